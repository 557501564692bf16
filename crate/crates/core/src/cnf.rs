//! DIMACS encoding of "there is an avoiding 2-coloring" and decoding of
//! solver models.
//!
//! Variable `i + 1` is true when integer `lo + i` has color 1. Every value
//! set contributes a positive and a negative clause.

use std::fmt::Write as _;
use std::io::{self, Write as _};
use std::path::Path;

use thiserror::Error;

use crate::model::{BoundTemplate, Coloring, ModelError};
use crate::search::{verify_witness, InstanceIndex, SearchError};

pub const ENCODER_VERSION: &str = concat!("monochrome-cnf ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfDocument {
    pub vars: usize,
    pub clauses: Vec<Vec<i64>>,
    /// Provenance written as `c key=value` lines.
    pub header: Vec<(String, String)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("variable {0} is unassigned")]
    Missing(usize),
    #[error("variable {0} is assigned both ways")]
    Contradictory(usize),
    #[error("literal {lit} is out of range for {vars} variables")]
    OutOfRange { lit: i64, vars: usize },
    #[error("unreadable token `{0}`")]
    Token(String),
    #[error("solver reported the formula unsatisfiable")]
    Unsatisfiable,
    #[error("interval [{lo}, {hi}] is invalid")]
    Interval { lo: u64, hi: u64 },
    #[error("malformed DIMACS: {0}")]
    Dimacs(String),
}

/// Encode the avoiding-coloring problem for `[lo, n]`.
pub fn encode(bound: &BoundTemplate, lo: u64, n: u64, symmetry_break: bool) -> Result<CnfDocument, ModelError> {
    let index = InstanceIndex::build(bound, lo, n)?;
    let mut clauses = Vec::with_capacity(2 * index.sets().len() + 1);
    if symmetry_break {
        clauses.push(vec![-1]);
    }
    for set in index.sets() {
        let pos: Vec<i64> = set.iter().map(|&v| v as i64 + 1).collect();
        let neg: Vec<i64> = pos.iter().map(|l| -l).collect();
        clauses.push(pos);
        clauses.push(neg);
    }
    let params = if bound.params().is_empty() { "none".to_string() } else { bound.params().to_string() };
    let header = vec![
        ("encoder".into(), ENCODER_VERSION.into()),
        ("template".into(), bound.template().name().into()),
        ("params".into(), params),
        ("distinct".into(), bound.template().distinctness().keyword().into()),
        ("lo".into(), lo.to_string()),
        ("n".into(), n.to_string()),
        ("instances".into(), index.raw_count().to_string()),
        ("value-sets".into(), index.sets().len().to_string()),
        ("symmetry-break".into(), if symmetry_break { "yes" } else { "no" }.into()),
    ];
    Ok(CnfDocument { vars: index.width(), clauses, header })
}

impl CnfDocument {
    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.header {
            writeln!(out, "c {k}={v}").unwrap();
        }
        writeln!(out, "p cnf {} {}", self.vars, self.clauses.len()).unwrap();
        for clause in &self.clauses {
            for lit in clause {
                write!(out, "{lit} ").unwrap();
            }
            out.push_str("0\n");
        }
        out
    }

    /// Write via a temporary file in the same directory, then rename.
    pub fn write_atomic(&self, path: &Path) -> io::Result<()> {
        write_atomic(path, self.render().as_bytes())
    }

    pub fn parse(text: &str) -> Result<CnfDocument, DecodeError> {
        let mut header = Vec::new();
        let mut declared: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('c') {
                if let Some((k, v)) = c.trim().split_once('=') {
                    header.push((k.trim().to_string(), v.trim().to_string()));
                }
                continue;
            }
            if let Some(p) = line.strip_prefix("p cnf") {
                let nums: Vec<usize> = p.split_whitespace().filter_map(|t| t.parse().ok()).collect();
                if nums.len() != 2 {
                    return Err(DecodeError::Dimacs(format!("bad problem line `{line}`")));
                }
                declared = Some((nums[0], nums[1]));
                continue;
            }
            let (vars, _) = declared.ok_or_else(|| DecodeError::Dimacs("clause before problem line".into()))?;
            for tok in line.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| DecodeError::Token(tok.to_string()))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() as usize > vars {
                    return Err(DecodeError::OutOfRange { lit, vars });
                } else {
                    current.push(lit);
                }
            }
        }
        let (vars, count) = declared.ok_or_else(|| DecodeError::Dimacs("missing problem line".into()))?;
        if !current.is_empty() || clauses.len() != count {
            return Err(DecodeError::Dimacs(format!("expected {count} clauses, found {}", clauses.len())));
        }
        Ok(CnfDocument { vars, clauses, header })
    }

    /// Does `assignment` (indexed from variable 1) satisfy every clause?
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0)))
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Satisfiable,
    Unsatisfiable,
    Unknown,
}

/// Status line and literals found in solver output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverOutput {
    pub status: Option<SolverStatus>,
    pub literals: Vec<i64>,
}

/// Read `s` status lines and either `v` lines or a bare literal list.
pub fn parse_solver_output(text: &str) -> Result<SolverOutput, DecodeError> {
    let mut status = None;
    let has_v = text.lines().any(|l| l.trim_start().starts_with("v ") || l.trim() == "v");
    let mut literals = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(match s.trim() {
                "SATISFIABLE" => SolverStatus::Satisfiable,
                "UNSATISFIABLE" => SolverStatus::Unsatisfiable,
                _ => SolverStatus::Unknown,
            });
            continue;
        }
        let body = match line.strip_prefix('v') {
            Some(rest) => rest,
            None if has_v => continue,
            None => line,
        };
        for tok in body.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| DecodeError::Token(tok.to_string()))?;
            if lit != 0 {
                literals.push(lit);
            }
        }
    }
    Ok(SolverOutput { status, literals })
}

/// Turn a solver model into the explicit coloring of `[lo, n]`.
pub fn decode_model(text: &str, lo: u64, n: u64) -> Result<Coloring, DecodeError> {
    if lo == 0 || lo > n {
        return Err(DecodeError::Interval { lo, hi: n });
    }
    let out = parse_solver_output(text)?;
    if out.status == Some(SolverStatus::Unsatisfiable) {
        return Err(DecodeError::Unsatisfiable);
    }
    let vars = (n - lo + 1) as usize;
    let mut colors: Vec<Option<u8>> = vec![None; vars];
    for lit in out.literals {
        let v = lit.unsigned_abs() as usize;
        if v == 0 || v > vars {
            return Err(DecodeError::OutOfRange { lit, vars });
        }
        let c = u8::from(lit > 0);
        match colors[v - 1] {
            Some(prev) if prev != c => return Err(DecodeError::Contradictory(v)),
            _ => colors[v - 1] = Some(c),
        }
    }
    let colors: Vec<u8> =
        colors.iter().enumerate().map(|(i, c)| c.ok_or(DecodeError::Missing(i + 1))).collect::<Result<_, _>>()?;
    Ok(Coloring::explicit(lo, &colors).expect("non-empty interval"))
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Decode a model and accept it only if it really avoids every instance.
pub fn check_model(bound: &BoundTemplate, lo: u64, n: u64, text: &str) -> Result<bool, CheckError> {
    let coloring = decode_model(text, lo, n)?;
    Ok(verify_witness(bound, &coloring)?)
}
