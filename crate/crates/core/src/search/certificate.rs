use std::fmt::{self, Write};

use super::ENGINE_VERSION;
use crate::model::{BoundTemplate, Coloring, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Forced,
    Avoidable,
    Inconclusive,
}

impl Verdict {
    pub fn keyword(self) -> &'static str {
        match self {
            Verdict::Forced => "forced",
            Verdict::Avoidable => "avoidable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Outcome of one forcing decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchCertificate {
    pub template: String,
    pub params: Params,
    pub lo: u64,
    pub n: u64,
    pub verdict: Verdict,
    /// Distinct value sets inside the interval.
    pub instances: usize,
    pub nodes: u64,
    pub propagations: u64,
    pub witness: Option<Coloring>,
    pub note: Option<String>,
    pub engine_version: String,
}

fn bits(c: &Coloring) -> String {
    c.to_colors().map(|v| v.iter().map(|&b| char::from(b'0' + b)).collect()).unwrap_or_default()
}

fn params_text(p: &Params) -> String {
    if p.is_empty() {
        "none".to_string()
    } else {
        p.to_string()
    }
}

impl SearchCertificate {
    pub(crate) fn new(bound: &BoundTemplate, lo: u64, n: u64) -> SearchCertificate {
        SearchCertificate {
            template: bound.template().name().to_string(),
            params: bound.params().clone(),
            lo,
            n,
            verdict: Verdict::Inconclusive,
            instances: 0,
            nodes: 0,
            propagations: 0,
            witness: None,
            note: None,
            engine_version: ENGINE_VERSION.to_string(),
        }
    }

    /// Line-oriented `key: value` rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "engine: {}", self.engine_version).unwrap();
        writeln!(out, "template: {}", self.template).unwrap();
        writeln!(out, "params: {}", params_text(&self.params)).unwrap();
        writeln!(out, "lo: {}", self.lo).unwrap();
        writeln!(out, "n: {}", self.n).unwrap();
        writeln!(out, "instances: {}", self.instances).unwrap();
        writeln!(out, "verdict: {}", self.verdict).unwrap();
        writeln!(out, "nodes: {}", self.nodes).unwrap();
        writeln!(out, "propagations: {}", self.propagations).unwrap();
        if let Some(note) = &self.note {
            writeln!(out, "note: {note}").unwrap();
        }
        if let Some(w) = &self.witness {
            writeln!(out, "witness: {}", bits(w)).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdRow {
    pub n: u64,
    pub verdict: Verdict,
    pub nodes: u64,
    pub propagations: u64,
    /// Settled by extending the previous witness.
    pub hinted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdOutcome {
    Found(u64),
    ExceedsMax,
    Inconclusive(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdReport {
    pub template: String,
    pub params: Params,
    pub lo: u64,
    pub max_n: u64,
    pub outcome: ThresholdOutcome,
    pub rows: Vec<ThresholdRow>,
    /// Avoiding coloring of the largest avoidable interval seen.
    pub witness: Option<Coloring>,
    pub engine_version: String,
}

impl ThresholdReport {
    pub(crate) fn new(bound: &BoundTemplate, lo: u64, max_n: u64) -> ThresholdReport {
        ThresholdReport {
            template: bound.template().name().to_string(),
            params: bound.params().clone(),
            lo,
            max_n,
            outcome: ThresholdOutcome::ExceedsMax,
            rows: Vec::new(),
            witness: None,
            engine_version: ENGINE_VERSION.to_string(),
        }
    }

    pub fn threshold(&self) -> Option<u64> {
        match self.outcome {
            ThresholdOutcome::Found(n) => Some(n),
            _ => None,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "engine: {}", self.engine_version).unwrap();
        writeln!(out, "template: {}", self.template).unwrap();
        writeln!(out, "params: {}", params_text(&self.params)).unwrap();
        writeln!(out, "lo: {}", self.lo).unwrap();
        writeln!(out, "max-n: {}", self.max_n).unwrap();
        match self.outcome {
            ThresholdOutcome::Found(n) => writeln!(out, "threshold: {n}").unwrap(),
            ThresholdOutcome::ExceedsMax => writeln!(out, "threshold: exceeds maxN").unwrap(),
            ThresholdOutcome::Inconclusive(n) => writeln!(out, "threshold: inconclusive at n={n}").unwrap(),
        }
        for r in &self.rows {
            writeln!(
                out,
                "row: n={} verdict={} nodes={} propagations={} hint={}",
                r.n,
                r.verdict,
                r.nodes,
                r.propagations,
                if r.hinted { "yes" } else { "no" }
            )
            .unwrap();
        }
        if let Some(w) = &self.witness {
            writeln!(out, "witness-n: {}", w.hi()).unwrap();
            writeln!(out, "witness: {}", bits(w)).unwrap();
        }
        out
    }
}
