use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::time::Duration;

use monochrome::builtin;
use monochrome::cnf::{self, CheckError, DecodeError};
use monochrome::hindman::{self, SetSequence, VdwQuery};
use monochrome::model::coloring::parse_big;
use monochrome::search::{self, Budget, SearchConfig, ThresholdOutcome, Verdict};
use monochrome::thick::{self, generators, ClassifyParams, ExtractError, ExtractMode, ScanWitness};
use monochrome::{BoundTemplate, Coloring, Params, RuleSpec, Template};
use num_bigint::BigUint;

use crate::plan::{CnfCommand, Command, Mode, RunPlan, SearchArgs, TemplateArgs};

pub const VERSION: &str = concat!("monochrome ", env!("CARGO_PKG_VERSION"));

/// Process exit codes.
pub mod exit {
    pub const DEFINITIVE: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INCONCLUSIVE: i32 = 3;
}

#[derive(Debug)]
pub enum RunError {
    Usage(String),
    Internal(String),
}

impl RunError {
    pub fn code(&self) -> i32 {
        match self {
            RunError::Usage(_) => exit::USAGE,
            RunError::Internal(_) => exit::INTERNAL,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            RunError::Usage(m) | RunError::Internal(m) => m,
        }
    }
}

fn usage(e: impl ToString) -> RunError {
    RunError::Usage(e.to_string())
}

fn internal(e: impl ToString) -> RunError {
    RunError::Internal(e.to_string())
}

/// A finished run: exit code and the full report text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub report: String,
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

pub fn load_template(args: &TemplateArgs) -> Result<BoundTemplate, RunError> {
    let path = Path::new(&args.template);
    let template = if path.is_file() {
        let text = fs::read_to_string(path).map_err(usage)?;
        Template::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
    } else {
        builtin::template(&args.template).ok_or_else(|| usage(format!("no template file or bundled template `{}`", args.template)))?
    };
    let mut params = Params::new();
    for p in &args.params {
        params.bind_str(p).map_err(usage)?;
    }
    BoundTemplate::new(template, &params).map_err(usage)
}

/// `file:<path>`, `rule:<name>:<params>` or `generated`.
pub fn load_coloring(source: &str, seed: u64, mode: ExtractMode) -> Result<Coloring, RunError> {
    if let Some(path) = source.strip_prefix("file:") {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
        Coloring::parse_file(&text).map_err(|e| usage(format!("{path}: {e}")))
    } else if source.starts_with("rule:") {
        source.parse::<RuleSpec>().and_then(RuleSpec::into_coloring).map_err(usage)
    } else if source == "generated" {
        Ok(generators::adversarial(seed, mode).coloring)
    } else {
        Err(usage(format!("coloring `{source}` is not file:<path>, rule:<spec> or generated")))
    }
}

fn search_config(a: &SearchArgs) -> SearchConfig {
    let time = (a.time_limit > 0).then(|| Duration::from_secs(a.time_limit));
    let mut cfg = SearchConfig::with_budget(Budget { nodes: a.max_nodes, time }).parallel(a.threads);
    cfg.symmetry_break = !a.no_symmetry_break;
    cfg
}

fn list(s: &str) -> Result<Vec<u64>, RunError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse().map_err(|_| usage(format!("`{t}` is not a positive integer")))).collect()
}

fn sets(s: &str) -> Result<Vec<Vec<u64>>, RunError> {
    s.split(';').filter(|t| !t.trim().is_empty()).map(list).collect()
}

fn sizes(s: &str) -> Result<Vec<usize>, RunError> {
    Ok(list(s)?.into_iter().map(|v| v as usize).collect())
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Inconclusive => exit::INCONCLUSIVE,
        _ => exit::DEFINITIVE,
    }
}

fn extract_n(mode: Mode, params: &[String]) -> Result<u64, RunError> {
    let mut p = Params::new();
    for b in params {
        p.bind_str(b).map_err(usage)?;
    }
    if let Some((k, _)) = p.iter().find(|(k, _)| *k != "n") {
        return Err(usage(format!("extract takes only the parameter n, not `{k}`")));
    }
    Ok(p.get("n").unwrap_or(match mode {
        Mode::Xny => 1,
        Mode::Tower => 2,
    }))
}

/// First monochromatic instance of `bound` under an explicit coloring.
fn first_instance(bound: &BoundTemplate, c: &Coloring) -> Result<Option<String>, RunError> {
    let (Ok(lo), Ok(hi)) = (u64::try_from(c.lo()), u64::try_from(c.hi())) else {
        return Err(usage("verify needs a coloring with a finite, enumerable domain"));
    };
    for (a, values) in bound.enumerate(lo, hi).map_err(usage)? {
        if let Some(color) = c.monochromatic_color(&values).map_err(internal)? {
            return Ok(Some(format!("{values} at {a} with color {color}")));
        }
    }
    Ok(None)
}

fn run_extract(plan: &RunPlan, a: &crate::plan::ExtractArgs, out: &mut String) -> Result<i32, RunError> {
    let n = extract_n(a.mode, &a.params)?;
    let mode = match a.mode {
        Mode::Xny => ExtractMode::Xny { n },
        Mode::Tower => ExtractMode::Tower { n },
    };
    let floor: BigUint = parse_big(&a.floor).ok_or_else(|| usage(format!("floor `{}` is not an integer", a.floor)))?;
    let c = load_coloring(&a.coloring, plan.seed, mode)?;
    let classes: Vec<u8> = match a.class.as_str() {
        "0" => vec![0],
        "1" => vec![1],
        "auto" => vec![0, 1],
        other => return Err(usage(format!("class `{other}` is not 0, 1 or auto"))),
    };
    let mut last = None;
    for &class in &classes {
        let w = ScanWitness::new(&c, class).with_budget(a.candidates);
        match thick::extract(&c, &w, mode, &floor) {
            Ok(r) => {
                r.verify(&c).map_err(|e| internal(format!("extraction failed re-verification: {e}")))?;
                r.trace.replay(&c).map_err(|e| internal(format!("trace does not replay at step {}", e.index)))?;
                writeln!(out, "class: {class}").unwrap();
                out.push_str(&r.render());
                writeln!(out, "verified: yes").unwrap();
                return Ok(exit::DEFINITIVE);
            }
            Err(ExtractError::Witness(e)) if classes.len() > 1 && class == 0 => {
                writeln!(out, "attempt: class=0 {e}").unwrap();
                last = Some(ExtractError::Witness(e));
            }
            Err(e) => {
                last = Some(e);
                writeln!(out, "class: {class}").unwrap();
                break;
            }
        }
    }
    let err = last.expect("at least one attempt");
    writeln!(out, "mode: {mode}").unwrap();
    writeln!(out, "outcome: failure").unwrap();
    writeln!(out, "error: {err}").unwrap();
    match err {
        ExtractError::Witness(e) => {
            out.push_str(&e.partial.render());
            Ok(exit::INCONCLUSIVE)
        }
        ExtractError::ScaleExhaustion { trace, .. } | ExtractError::Unjustified { trace, .. } => {
            out.push_str(&trace.render());
            Ok(exit::INCONCLUSIVE)
        }
        ExtractError::Parameter(_) => Err(usage(err)),
        ExtractError::Verification(_) => Err(internal(err)),
    }
}

fn body(plan: &RunPlan, out: &mut String) -> Result<i32, RunError> {
    let default_mode = ExtractMode::Xny { n: 1 };
    match &plan.command {
        Command::Forced(a) => {
            let bound = load_template(&a.template)?;
            let cert = search::forced(&bound, a.lo, a.n, &search_config(&a.search)).map_err(usage)?;
            out.push_str(&cert.render());
            Ok(verdict_code(cert.verdict))
        }
        Command::Threshold(a) => {
            let bound = load_template(&a.template)?;
            let report = search::threshold(&bound, a.lo, a.max_n, &search_config(&a.search)).map_err(usage)?;
            out.push_str(&report.render());
            Ok(match report.outcome {
                ThresholdOutcome::Found(_) => exit::DEFINITIVE,
                _ => exit::INCONCLUSIVE,
            })
        }
        Command::Witness(a) => {
            let i = &a.interval;
            let bound = load_template(&i.template)?;
            let cert = search::forced(&bound, i.lo, i.n, &search_config(&i.search)).map_err(usage)?;
            out.push_str(&cert.render());
            if let Some(w) = &cert.witness {
                let ok = search::verify_witness(&bound, w).map_err(internal)?;
                if !ok {
                    return Err(internal("witness failed verification"));
                }
                writeln!(out, "verified: yes").unwrap();
                if let Some(path) = &a.out {
                    let text = w.to_file_string().expect("witnesses are explicit");
                    write_atomic(path, &text).map_err(|e| internal(format!("{}: {e}", path.display())))?;
                    writeln!(out, "witness-file: {}", path.display()).unwrap();
                }
            } else if cert.verdict == Verdict::Forced {
                writeln!(out, "witness-file: none").unwrap();
            }
            Ok(verdict_code(cert.verdict))
        }
        Command::Verify(a) => {
            let bound = load_template(&a.template)?;
            let c = load_coloring(&a.coloring, plan.seed, default_mode)?;
            writeln!(out, "template: {}", bound.id()).unwrap();
            writeln!(out, "domain: [{}, {}]", c.lo(), c.hi()).unwrap();
            match first_instance(&bound, &c)? {
                None => writeln!(out, "valid: yes").unwrap(),
                Some(inst) => {
                    writeln!(out, "valid: no").unwrap();
                    writeln!(out, "instance: {inst}").unwrap();
                }
            }
            Ok(exit::DEFINITIVE)
        }
        Command::Cnf(CnfCommand::Emit(a)) => {
            let bound = load_template(&a.template)?;
            let doc = cnf::encode(&bound, a.lo, a.n, !a.no_symmetry_break).map_err(usage)?;
            doc.write_atomic(&a.out).map_err(|e| internal(format!("{}: {e}", a.out.display())))?;
            writeln!(out, "encoder: {}", cnf::ENCODER_VERSION).unwrap();
            writeln!(out, "template: {}", bound.id()).unwrap();
            writeln!(out, "lo: {}", a.lo).unwrap();
            writeln!(out, "n: {}", a.n).unwrap();
            writeln!(out, "vars: {}", doc.vars).unwrap();
            writeln!(out, "clauses: {}", doc.clauses.len()).unwrap();
            writeln!(out, "cnf-file: {}", a.out.display()).unwrap();
            Ok(exit::DEFINITIVE)
        }
        Command::Cnf(CnfCommand::CheckModel(a)) => {
            let bound = load_template(&a.template)?;
            let text = fs::read_to_string(&a.model).map_err(|e| usage(format!("{}: {e}", a.model.display())))?;
            writeln!(out, "template: {}", bound.id()).unwrap();
            writeln!(out, "lo: {}", a.lo).unwrap();
            writeln!(out, "n: {}", a.n).unwrap();
            match cnf::check_model(&bound, a.lo, a.n, &text) {
                Ok(true) => writeln!(out, "model: accepted").unwrap(),
                Ok(false) => writeln!(out, "model: rejected (a monochromatic instance remains)").unwrap(),
                Err(CheckError::Decode(DecodeError::Unsatisfiable)) => writeln!(out, "model: none (solver reports unsatisfiable)").unwrap(),
                Err(CheckError::Decode(e)) => writeln!(out, "model: rejected ({e})").unwrap(),
                Err(CheckError::Search(e)) => return Err(internal(e)),
            }
            Ok(exit::DEFINITIVE)
        }
        Command::Structures(a) => {
            let c = load_coloring(&a.coloring, plan.seed, default_mode)?;
            let sz = sizes(&a.sizes)?;
            writeln!(out, "sizes: {}", a.sizes).unwrap();
            match hindman::find_structure(&c, &sz) {
                Some(s) => {
                    let ok = hindman::verify_structure(&c, &s);
                    writeln!(out, "structure: found").unwrap();
                    writeln!(out, "color: {}", s.color).unwrap();
                    out.push_str(&s.seq.render());
                    writeln!(out, "verified: {}", if ok { "yes" } else { "no" }).unwrap();
                    if !ok {
                        return Err(internal("structure failed verification"));
                    }
                }
                None => writeln!(out, "structure: none").unwrap(),
            }
            Ok(exit::DEFINITIVE)
        }
        Command::Bichromatic(a) => {
            let c = load_coloring(&a.coloring, plan.seed, default_mode)?;
            let sz = sizes(&a.sizes)?;
            writeln!(out, "size0: {}", a.size0).unwrap();
            writeln!(out, "sizes: {}", a.sizes).unwrap();
            match hindman::find_bichromatic_structure(&c, a.size0, &sz) {
                Some(s) => {
                    let ok = hindman::verify_bichromatic(&c, &s);
                    writeln!(out, "structure: found").unwrap();
                    writeln!(out, "color: {}", s.color).unwrap();
                    out.push_str(&s.seq.render());
                    writeln!(out, "verified: {}", if ok { "yes" } else { "no" }).unwrap();
                    if !ok {
                        return Err(internal("structure failed verification"));
                    }
                }
                None => writeln!(out, "structure: none").unwrap(),
            }
            Ok(exit::DEFINITIVE)
        }
        Command::Bridge(a) => {
            let seq = SetSequence::with_s0(list(&a.s0)?, sets(&a.sets)?).map_err(usage)?;
            let pair = hindman::bridge_sum_product(&seq, &list(&a.choices)?).map_err(usage)?;
            let join = |v: &[BigUint]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
            out.push_str(&seq.render());
            writeln!(out, "a: {}", pair.a).unwrap();
            writeln!(out, "b: {}", pair.b).unwrap();
            writeln!(out, "F: {}", join(&pair.f)).unwrap();
            writeln!(out, "G: {}", join(&pair.g)).unwrap();
            writeln!(out, "sum-F: {}", pair.sum_f()).unwrap();
            writeln!(out, "product-G: {}", pair.product_g()).unwrap();
            Ok(exit::DEFINITIVE)
        }
        Command::VdwStep(a) => {
            let tau: f64 = a.tau.parse().map_err(|_| usage(format!("tau `{}` is not a number", a.tau)))?;
            if !(tau > 0.0 && tau <= 1.0) {
                return Err(usage("tau must lie in (0, 1]"));
            }
            let set: Vec<u64> = match (&a.set, &a.coloring) {
                (Some(s), None) => list(s)?,
                (None, Some(src)) => {
                    let c = load_coloring(src, plan.seed, default_mode)?;
                    let class = a.class.expect("clap requires --class");
                    (a.lo..=a.hi).filter(|&v| matches!(c.color_of_u64(v), Ok(k) if k == class)).collect()
                }
                _ => return Err(usage("give exactly one of --set or --coloring")),
            };
            let q = VdwQuery { lo: a.lo, hi: a.hi, k: a.k, tau };
            writeln!(out, "set-size: {}", set.iter().filter(|&&x| x >= a.lo && x <= a.hi).count()).unwrap();
            match hindman::find_vdw_step(&set, &list(&a.steps)?, &q) {
                Some((d, count)) => {
                    writeln!(out, "step: {d}").unwrap();
                    writeln!(out, "intersection: {count}").unwrap();
                }
                None => writeln!(out, "step: none").unwrap(),
            }
            Ok(exit::DEFINITIVE)
        }
        Command::Extract(a) => run_extract(plan, a, out),
        Command::Classify(a) => {
            let c = load_coloring(&a.coloring, plan.seed, default_mode)?;
            let params = ClassifyParams { fbound: a.fbound, min_runs: a.min_runs, window: (a.window_lo, a.window_hi) };
            out.push_str(&thick::classify(&c, &params).render());
            Ok(exit::DEFINITIVE)
        }
    }
}

/// Run a plan; the report starts with the plan and version lines.
pub fn execute(plan: &RunPlan) -> Result<Execution, RunError> {
    let mut report = format!("plan: {}\nversion: {VERSION}\n", plan.render());
    let code = body(plan, &mut report)?;
    if let Some(path) = &plan.report {
        write_atomic(path, &report).map_err(|e| internal(format!("{}: {e}", path.display())))?;
    }
    Ok(Execution { code, report })
}
