#![allow(dead_code)]

use monochrome::builtin;
use monochrome::BoundTemplate;

/// The bundled suite with the parameter values it is checked at.
pub fn suite() -> Vec<BoundTemplate> {
    builtin::suite()
}

/// Bitmask per distinct value set over `[lo, n]`, bit `v - lo` for value `v`.
pub fn masks(bound: &BoundTemplate, lo: u64, n: u64) -> Vec<u64> {
    let mut m: Vec<u64> = bound
        .value_sets(lo, n)
        .unwrap()
        .iter()
        .map(|vs| vs.iter().fold(0u64, |acc, &v| acc | 1 << (v - lo)))
        .collect();
    m.sort_unstable();
    m.dedup();
    m
}

/// Coloring bit `i` is the color of `lo + i`.
pub fn avoids(masks: &[u64], coloring: u64) -> bool {
    masks.iter().all(|&m| coloring & m != m && coloring & m != 0)
}

/// Least avoiding coloring of a `width`-element interval, as a bitmask.
pub fn brute_avoiding(masks: &[u64], width: u32) -> Option<u64> {
    (0..1u64 << width).find(|&c| avoids(masks, c))
}

/// Direct evaluation of the bundled forms, written out by hand.
pub fn oracle_forms(bound: &BoundTemplate) -> fn(&[u64], u64) -> Vec<u64> {
    match bound.template().name() {
        "schur" => |v, _| vec![v[0], v[1], v[0] + v[1]],
        "schur-product" => |v, _| vec![v[0], v[1], v[0] * v[1]],
        "xyxy" | "xyxy-distinct" | "xyxy-values" => |v, _| vec![v[0], v[1], v[0] * v[1], v[0] + v[1]],
        "xny" => |v, n| vec![v[0], v[1], v[0] * v[1], v[0] + n * v[1]],
        "tower2" => |v, _| vec![v[0], v[1], v[0] * v[1], v[0] + v[1]],
        "tower3" => |v, _| vec![v[0], v[1], v[2], v[0] * v[1], v[0] * v[1] * v[2], v[0] + v[1] + v[2]],
        "partial-products-2-1" => |v, _| vec![v[0], v[0] + v[1], v[0] * v[1]],
        other => panic!("no oracle for {other}"),
    }
}

/// `(assignment, sorted value set)` for every assignment with all values
/// in `[lo, hi]`, by nested loops over `[1, hi]^arity`.
pub fn oracle_instances(bound: &BoundTemplate, lo: u64, hi: u64) -> Vec<(Vec<u64>, Vec<u64>)> {
    let eval = oracle_forms(bound);
    let n = bound.params().get("n").unwrap_or(0);
    let arity = bound.arity();
    let policy = bound.template().distinctness().keyword();
    let mut out = Vec::new();
    let mut a = vec![1u64; arity];
    loop {
        let raw = eval(&a, n);
        let mut vals = raw.clone();
        vals.sort_unstable();
        vals.dedup();
        let vars_ok = policy != "vars" || {
            let mut s = a.clone();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        };
        let values_ok = policy != "values" || vals.len() == raw.len();
        if vars_ok && values_ok && vals.iter().all(|&v| v >= lo && v <= hi) {
            out.push((a.clone(), vals));
        }
        let Some(i) = (0..arity).rev().find(|&i| a[i] < hi) else { break };
        a[i] += 1;
        a[i + 1..].iter_mut().for_each(|x| *x = 1);
    }
    out
}

/// Solve a rendered DIMACS file with an independent solver. Returns the
/// model as a color string over all `vars` when satisfiable.
pub fn external_solve(dimacs: &str, vars: usize) -> Option<Vec<u8>> {
    use varisat::ExtendFormula;
    let mut solver = varisat::Solver::new();
    solver.add_dimacs_cnf(dimacs.as_bytes()).expect("valid DIMACS");
    // Mention every variable so unconstrained ones appear in the model.
    for v in 1..=vars as isize {
        let l = varisat::Lit::from_dimacs(v);
        solver.add_clause(&[l, !l]);
    }
    if !solver.solve().expect("solver runs") {
        return None;
    }
    let mut colors = vec![0u8; vars];
    for lit in solver.model().expect("model after SAT") {
        if lit.is_positive() {
            colors[lit.var().to_dimacs() as usize - 1] = 1;
        }
    }
    Some(colors)
}

/// A model file in solver output format.
pub fn model_text(colors: &[u8]) -> String {
    let lits: Vec<String> =
        colors.iter().enumerate().map(|(i, &c)| if c == 1 { format!("{}", i + 1) } else { format!("-{}", i + 1) }).collect();
    format!("s SATISFIABLE\nv {} 0\n", lits.join(" "))
}

/// A sequence of blocks with its `(value, meets first block)` table.
pub type Candidate = (Vec<Vec<u64>>, Vec<(u64, bool)>);

fn fits(seq: &[Vec<u64>], split: bool, lo: u64, hi: u64) -> Option<Vec<(u64, bool)>> {
    let elems: Vec<(usize, u64)> = seq.iter().enumerate().flat_map(|(b, s)| s.iter().map(move |&e| (b, e))).collect();
    let mut out = Vec::new();
    for mask in 1u32..1 << elems.len() {
        let mut sums = vec![0u64; seq.len()];
        for (i, &(b, e)) in elems.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sums[b] += e;
            }
        }
        let v: u64 = sums.iter().filter(|&&s| s > 0).product();
        if v < lo || v > hi {
            return None;
        }
        out.push((v, split && sums[0] > 0));
    }
    Some(out)
}

fn tuples(lo: u64, hi: u64, size: usize, used: &[u64]) -> Vec<Vec<u64>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in lo..=hi {
        if used.contains(&first) {
            continue;
        }
        for mut rest in tuples(first + 1, hi, size - 1, used) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every sequence of disjoint increasing tuples with the given sizes whose
/// selection values all lie in `[lo, hi]`, in lex order of concatenation,
/// with its `(value, meets first block)` table.
pub fn structure_candidates(lo: u64, hi: u64, sizes: &[usize], split: bool) -> Vec<Candidate> {
    fn go(lo: u64, hi: u64, sizes: &[usize], split: bool, acc: &mut Vec<Vec<u64>>, out: &mut Vec<Candidate>) {
        if acc.len() == sizes.len() {
            if let Some(table) = fits(acc, split, lo, hi) {
                out.push((acc.clone(), table));
            }
            return;
        }
        let used: Vec<u64> = acc.iter().flatten().copied().collect();
        for t in tuples(lo, hi, sizes[acc.len()], &used) {
            acc.push(t);
            go(lo, hi, sizes, split, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(lo, hi, sizes, split, &mut Vec::new(), &mut out);
    out
}

/// First candidate whose table is monochromatic (or split by the first
/// block when `split`) under `colors` of `[lo, ..]`.
pub fn brute_structure(
    candidates: &[Candidate],
    lo: u64,
    colors: &[u8],
    split: bool,
) -> Option<(u8, Vec<Vec<u64>>)> {
    let col = |v: u64| colors[(v - lo) as usize];
    candidates.iter().find_map(|(seq, table)| {
        let target = if split {
            table.iter().find(|(_, meets)| *meets).map(|&(v, _)| col(v))?
        } else {
            col(table[0].0)
        };
        let ok = table.iter().all(|&(v, meets)| col(v) == if !split || meets { target } else { 1 - target });
        ok.then(|| (target, seq.clone()))
    })
}

/// Every size profile with positive entries summing to at most `total`.
pub fn profiles(total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn go(left: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !acc.is_empty() {
            out.push(acc.clone());
        }
        for s in 1..=left {
            acc.push(s);
            go(left - s, acc, out);
            acc.pop();
        }
    }
    go(total, &mut Vec::new(), &mut out);
    out
}

/// Least `d` in the finite sums of `steps` with enough progressions, by
/// direct scan.
pub fn scan_vdw(a: &[u64], steps: &[u64], lo: u64, hi: u64, k: u32, tau: f64) -> Option<(u64, usize)> {
    let inside: std::collections::BTreeSet<u64> = a.iter().copied().filter(|&x| x >= lo && x <= hi).collect();
    if inside.is_empty() {
        return None;
    }
    let mut ds = std::collections::BTreeSet::new();
    for mask in 1u32..1 << steps.len() {
        ds.insert(steps.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &s)| s).sum::<u64>());
    }
    for d in ds {
        let count = inside.iter().filter(|&&x| (1..=k as u64).all(|i| inside.contains(&(x + i * d)))).count();
        if count as f64 >= tau * inside.len() as f64 {
            return Some((d, count));
        }
    }
    None
}

pub mod extraction {
    use monochrome::thick::{self, generators, ExtractError, ExtractMode, ScanWitness};
    use num_bigint::BigUint;

    pub const MODES: [ExtractMode; 5] = [
        ExtractMode::Xny { n: 1 },
        ExtractMode::Xny { n: 2 },
        ExtractMode::Xny { n: 3 },
        ExtractMode::Tower { n: 2 },
        ExtractMode::Tower { n: 3 },
    ];

    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum Outcome {
        Success { exit_point: u8, verified: bool, replayed: bool, ladder_ok: bool },
        /// `kind` is `witness`, `scale` or `unjustified`; `evidence` says
        /// whether the failure carries a partial ladder or a replaying trace.
        Failure { kind: &'static str, evidence: bool },
        Other(String),
    }

    /// Extract from the generated coloring for `seed`, then recheck
    /// everything the result claims.
    pub fn run(seed: u64, mode: ExtractMode) -> (Outcome, String) {
        let g = generators::adversarial(seed, mode);
        let w = ScanWitness::new(&g.coloring, g.class);
        let out = match thick::extract(&g.coloring, &w, mode, &BigUint::default()) {
            Ok(r) => Outcome::Success {
                exit_point: r.exit_point,
                verified: r.verify(&g.coloring).is_ok(),
                replayed: r.trace.replay(&g.coloring).is_ok(),
                ladder_ok: r.ladder.recheck(&g.coloring).is_ok(),
            },
            Err(ExtractError::Witness(e)) => Outcome::Failure {
                kind: "witness",
                evidence: !e.partial.queries.is_empty() && e.partial.recheck(&g.coloring).is_ok(),
            },
            Err(ExtractError::ScaleExhaustion { trace, .. }) => {
                Outcome::Failure { kind: "scale", evidence: trace.replay(&g.coloring).is_ok() }
            }
            Err(ExtractError::Unjustified { trace, .. }) => Outcome::Failure {
                kind: "unjustified",
                evidence: trace.replay(&g.coloring).is_ok() && trace.steps.last().is_some_and(|s| !s.holds()),
            },
            Err(e) => Outcome::Other(e.to_string()),
        };
        (out, g.describe())
    }
}
