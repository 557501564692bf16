//! Forcing decisions, thresholds and witness colorings.

mod certificate;
mod dpll;
mod index;

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

pub use certificate::{SearchCertificate, ThresholdOutcome, ThresholdReport, ThresholdRow, Verdict};
pub use index::InstanceIndex;

use crate::model::{BoundTemplate, Coloring, ModelError};
use dpll::{Limits, Outcome, Solver, Stats, Stop};

pub const ENGINE_VERSION: &str = concat!("monochrome-search ", env!("CARGO_PKG_VERSION"));

/// Default node budget for one decision.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

/// Default wall-clock budget for one decision.
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(600);

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("search budget exhausted ({0})")]
    Inconclusive(String),
    #[error("coloring domain [{lo}, {hi}] cannot be enumerated")]
    Domain { lo: String, hi: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub nodes: u64,
    pub time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget { nodes: DEFAULT_NODE_BUDGET, time: Some(DEFAULT_TIME_BUDGET) }
    }
}

impl Budget {
    pub fn unlimited() -> Budget {
        Budget { nodes: u64::MAX, time: None }
    }

    pub fn nodes(nodes: u64) -> Budget {
        Budget { nodes, time: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget: Budget,
    /// 1 runs sequentially; more threads split the search tree.
    pub threads: usize,
    /// Number of leading decisions used to split work in parallel mode.
    pub split_depth: u32,
    /// Fix the color of the first integer to 0.
    pub symmetry_break: bool,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig { budget: Budget::default(), threads: 1, split_depth: 8, symmetry_break: true }
    }
}

impl SearchConfig {
    pub fn with_budget(budget: Budget) -> SearchConfig {
        SearchConfig { budget, ..SearchConfig::default() }
    }

    pub fn parallel(mut self, threads: usize) -> SearchConfig {
        self.threads = threads.max(1);
        self
    }
}

struct RawResult {
    outcome: Outcome,
    stats: Stats,
}

fn describe(stop: Stop, budget: &Budget) -> String {
    match stop {
        Stop::Nodes => format!("node budget {} reached", budget.nodes),
        Stop::Time => format!("time budget {}s reached", budget.time.map_or(0, |t| t.as_secs())),
        Stop::Cancelled => "cancelled".to_string(),
    }
}

fn run_index(index: &InstanceIndex, config: &SearchConfig) -> RawResult {
    let nodes = AtomicU64::new(0);
    let cancel = AtomicBool::new(false);
    let deadline = config.budget.time.map(|t| Instant::now() + t);
    let limits = Limits { max_nodes: config.budget.nodes, deadline, nodes: &nodes, cancel: &cancel };
    let width = index.width();
    let fixed = usize::from(config.symmetry_break);
    let split = if config.threads > 1 { (config.split_depth as usize).min(width.saturating_sub(fixed)) } else { 0 };

    let root = |prefix: usize| -> Option<Solver<'_>> {
        let mut s = Solver::new(index);
        if config.symmetry_break && width > 0 && !s.assume(0, 0) {
            return None;
        }
        for bit in 0..split {
            let color = ((prefix >> (split - 1 - bit)) & 1) as u8;
            if !s.assume((fixed + bit) as u32, color) {
                return None;
            }
        }
        Some(s)
    };

    if split == 0 {
        return match root(0) {
            None => RawResult { outcome: Outcome::Unsat, stats: Stats::default() },
            Some(mut s) => {
                let outcome = s.solve(&limits);
                RawResult { outcome, stats: s.stats }
            }
        };
    }

    // Subtrees in lexicographic order; the least satisfiable one wins so the
    // witness is still the least avoiding coloring.
    let best = AtomicUsize::new(usize::MAX);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.threads).build().expect("thread pool");
    let results: Vec<RawResult> = pool.install(|| {
        (0..1usize << split)
            .into_par_iter()
            .map(|prefix| {
                if best.load(Ordering::Relaxed) < prefix {
                    return RawResult { outcome: Outcome::Stopped(Stop::Cancelled), stats: Stats::default() };
                }
                match root(prefix) {
                    None => RawResult { outcome: Outcome::Unsat, stats: Stats::default() },
                    Some(mut s) => {
                        let outcome = s.solve(&limits);
                        if matches!(outcome, Outcome::Sat(_)) {
                            best.fetch_min(prefix, Ordering::Relaxed);
                        }
                        if matches!(outcome, Outcome::Stopped(Stop::Nodes | Stop::Time)) {
                            cancel.store(true, Ordering::Relaxed);
                        }
                        RawResult { outcome, stats: s.stats }
                    }
                }
            })
            .collect()
    });
    let mut stats = Stats::default();
    for r in &results {
        stats.nodes += r.stats.nodes;
        stats.propagations += r.stats.propagations;
    }
    let mut stopped = None;
    for r in results {
        match r.outcome {
            Outcome::Sat(a) => return RawResult { outcome: Outcome::Sat(a), stats },
            Outcome::Unsat => {}
            // A stopped subtree below every satisfiable one leaves the answer open.
            Outcome::Stopped(s) => {
                stopped.get_or_insert(s);
                if s != Stop::Cancelled {
                    return RawResult { outcome: Outcome::Stopped(s), stats };
                }
            }
        }
    }
    match stopped {
        Some(s) => RawResult { outcome: Outcome::Stopped(s), stats },
        None => RawResult { outcome: Outcome::Unsat, stats },
    }
}

fn decide(bound: &BoundTemplate, index: &InstanceIndex, config: &SearchConfig) -> SearchCertificate {
    let mut cert = SearchCertificate::new(bound, index.lo(), index.hi());
    cert.instances = index.sets().len();
    if let Some(e) = index.singleton() {
        cert.verdict = Verdict::Forced;
        cert.note = Some(format!("instance collapses to the single value {e}"));
        return cert;
    }
    let raw = run_index(index, config);
    cert.nodes = raw.stats.nodes;
    cert.propagations = raw.stats.propagations;
    match raw.outcome {
        Outcome::Unsat => cert.verdict = Verdict::Forced,
        Outcome::Sat(colors) => {
            let c = Coloring::explicit(index.lo(), &colors).expect("non-empty interval");
            cert.verdict = Verdict::Avoidable;
            cert.witness = Some(c);
        }
        Outcome::Stopped(stop) => {
            cert.verdict = Verdict::Inconclusive;
            cert.note = Some(describe(stop, &config.budget));
        }
    }
    if config.threads > 1 {
        cert.note.get_or_insert_with(|| format!("parallel search on {} threads", config.threads));
    }
    cert
}

/// Does every 2-coloring of `[lo, n]` contain a monochromatic instance?
pub fn forced(bound: &BoundTemplate, lo: u64, n: u64, config: &SearchConfig) -> Result<SearchCertificate, SearchError> {
    let index = InstanceIndex::build(bound, lo, n)?;
    let cert = decide(bound, &index, config);
    if let Some(w) = &cert.witness {
        assert!(verify_witness(bound, w)?, "search produced a coloring with a monochromatic instance");
    }
    Ok(cert)
}

/// The least avoiding coloring of `[lo, n]`, if one exists.
pub fn find_witness(bound: &BoundTemplate, lo: u64, n: u64, config: &SearchConfig) -> Result<Option<Coloring>, SearchError> {
    let cert = forced(bound, lo, n, config)?;
    match cert.verdict {
        Verdict::Inconclusive => Err(SearchError::Inconclusive(cert.note.unwrap_or_default())),
        _ => Ok(cert.witness),
    }
}

/// Whether `coloring` avoids every instance inside its domain, checked by
/// plain enumeration.
pub fn verify_witness(bound: &BoundTemplate, coloring: &Coloring) -> Result<bool, SearchError> {
    let domain = || SearchError::Domain { lo: coloring.lo().to_string(), hi: coloring.hi().to_string() };
    let lo = u64::try_from(coloring.lo()).map_err(|_| domain())?;
    let hi = u64::try_from(coloring.hi()).map_err(|_| domain())?;
    for (_, values) in bound.enumerate(lo, hi)? {
        if coloring.monochromatic_color(&values).expect("enumerated values are in range").is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn extend(c: &Coloring, color: u8) -> Coloring {
    let mut colors = c.to_colors().expect("witnesses are explicit");
    colors.push(color);
    let lo = u64::try_from(c.lo()).expect("explicit bounds");
    Coloring::explicit(lo, &colors).expect("non-empty")
}

/// Least `n` in `[lo, max_n]` at which the template is forced.
pub fn threshold(bound: &BoundTemplate, lo: u64, max_n: u64, config: &SearchConfig) -> Result<ThresholdReport, SearchError> {
    let mut report = ThresholdReport::new(bound, lo, max_n);
    if lo == 0 || lo > max_n {
        return Err(ModelError::Interval { lo, hi: max_n }.into());
    }
    let mut last: Option<Coloring> = None;
    for n in lo..=max_n {
        let index = InstanceIndex::build(bound, lo, n)?;
        // A witness for n - 1 extended by one color often still avoids.
        let hinted = last.as_ref().and_then(|w| {
            [0u8, 1].into_iter().map(|c| extend(w, c)).find(|c| verify_witness(bound, c).unwrap_or(false))
        });
        let row = if let Some(w) = hinted {
            last = Some(w);
            ThresholdRow { n, verdict: Verdict::Avoidable, nodes: 0, propagations: 0, hinted: true }
        } else {
            let cert = decide(bound, &index, config);
            if let Some(w) = &cert.witness {
                assert!(verify_witness(bound, w)?, "search produced a coloring with a monochromatic instance");
                last = Some(w.clone());
            }
            ThresholdRow { n, verdict: cert.verdict, nodes: cert.nodes, propagations: cert.propagations, hinted: false }
        };
        let verdict = row.verdict;
        report.rows.push(row);
        match verdict {
            Verdict::Forced => {
                report.outcome = ThresholdOutcome::Found(n);
                report.witness = last;
                return Ok(report);
            }
            Verdict::Inconclusive => {
                report.outcome = ThresholdOutcome::Inconclusive(n);
                report.witness = last;
                return Ok(report);
            }
            Verdict::Avoidable => {}
        }
    }
    report.outcome = ThresholdOutcome::ExceedsMax;
    report.witness = last;
    Ok(report)
}
