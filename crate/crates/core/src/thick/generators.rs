//! Colorings with a multiplicatively thick class, built to push the
//! extractors past their early exits.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ladder::Ladder;
use super::witness::ScanWitness;
use super::{extract, ladder_shape, ExtractMode};
use crate::model::{coloring::default_rule_hi, Color, Coloring, Rule, RuleSpec};

/// Rounds of adversarial flipping per generated coloring.
pub const MAX_ROUNDS: usize = 40;

#[derive(Debug, Clone)]
pub struct GeneratedColoring {
    pub seed: u64,
    pub base: RuleSpec,
    /// The thick class.
    pub class: Color,
    pub overrides: BTreeMap<BigUint, Color>,
    pub coloring: Coloring,
}

impl GeneratedColoring {
    pub fn describe(&self) -> String {
        format!("seed={} base={} class={} overrides={}", self.seed, self.base, self.class, self.overrides.len())
    }
}

/// Geometric blocks with base `L ∈ [4, 64]` whose first block reaches
/// about `2^1024`, random noise below `L` and in the gaps, and a few
/// other-color points sprinkled into `[L, 4L)`.
pub fn thick_blocks(rng: &mut ChaCha8Rng) -> (RuleSpec, Color, BTreeMap<BigUint, Color>) {
    let base: u64 = rng.gen_range(4..=64);
    let width = (1024.0 / (base as f64).log2()).ceil() as u64;
    let on: Color = rng.gen_range(0..=1);
    let rule = Rule::Blocks {
        base,
        width,
        gap: rng.gen_range(1..=4),
        skip: 1,
        on,
        noise: rng.gen_range(0..=300),
        seed: rng.gen(),
    };
    let mut sprinkle = BTreeMap::new();
    for _ in 0..rng.gen_range(0..=3) {
        sprinkle.insert(BigUint::from(rng.gen_range(base..4 * base)), 1 - on);
    }
    (RuleSpec { rule, lo: BigUint::from(1u32), hi: default_rule_hi() }, on, sprinkle)
}

/// Whether flipping `v` could change the ladder: `v` is `a_0` or lies in
/// one of the guaranteed dilations `[1, P_i]·a_{i+1}`.
pub fn protected(ladder: &Ladder, v: &BigUint) -> bool {
    if ladder.entries.first() == Some(v) {
        return true;
    }
    ladder.entries.iter().skip(1).zip(&ladder.bounds).any(|(a, p)| {
        let (q, r) = num_integer::Integer::div_rem(v, a);
        r == BigUint::default() && q >= BigUint::from(1u32) && &q <= p
    })
}

/// The values tested at the first point of the analysis for `mode`:
/// `a_j + n·a_i` for `i < j`, or every sum of exactly `n` entries.
pub fn first_point_values(ladder: &Ladder, mode: ExtractMode) -> Vec<BigUint> {
    let a = &ladder.entries;
    let mut out = Vec::new();
    match mode {
        ExtractMode::Xny { n } => {
            for j in 1..a.len() {
                for i in 0..j {
                    out.push(&a[j] + &a[i] * n);
                }
            }
        }
        ExtractMode::Tower { n } => {
            let (k, d) = (n as usize, a.len());
            if k == 0 || k > d {
                return out;
            }
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                out.push(idx.iter().map(|&i| &a[i]).sum());
                let Some(i) = (0..k).rev().find(|&i| idx[i] < d - k + i) else { break };
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
    }
    out
}

/// Color `values` with the class opposite to the ladder's, skipping
/// protected values and values outside the domain.
pub fn recolor(base: &Coloring, ladder: &Ladder, values: &[BigUint]) -> Coloring {
    let mut overrides = base.overrides().cloned().unwrap_or_default();
    for v in values {
        if base.contains(v) && !protected(ladder, v) {
            overrides.insert(v.clone(), 1 - ladder.class);
        }
    }
    let plain = match base.rule_ref() {
        Some(rule) => Coloring::rule(rule.clone(), base.lo().clone(), base.hi().clone()).expect("same domain"),
        None => base.clone(),
    };
    Coloring::with_overrides(plain, overrides)
}

fn first_point_sums(entries: &[u64], mode: ExtractMode) -> Vec<u64> {
    let l = Ladder {
        variant: ladder_shape(mode).1,
        n: mode.n(),
        class: 0,
        entries: entries.iter().map(|&e| BigUint::from(e)).collect(),
        bounds: Vec::new(),
        queries: Vec::new(),
    };
    first_point_values(&l, mode).iter().map(|v| u64::try_from(v).expect("small sums")).collect()
}

/// Greedily pick `count` entries, all `1 mod m` for `m > 2(n+1)`, such
/// that no first-point value lies in the set or is a multiple of an entry
/// other than the first.
///
/// Entries stay below twice the second entry, so a first-point value
/// could only be a multiple `(n+1)·e` (or `n·e`) by its residue; those
/// coincidences are what the greedy check rejects.
fn sparse_entries(rng: &mut ChaCha8Rng, start: u64, count: usize, mode: ExtractMode) -> Vec<u64> {
    let m = 2 * (mode.n() + 1) + 1;
    let mut lo = start.max(8 * m * count as u64);
    'restart: loop {
        let mut cand = lo - lo % m + 1;
        let mut s: Vec<u64> = Vec::new();
        while s.len() < count {
            cand += m;
            // Multiples of the second entry would be valid ladder choices.
            if s.len() >= 2 && cand >= 2 * s[1] {
                lo *= 2;
                continue 'restart;
            }
            if !rng.gen_bool(0.5) {
                continue;
            }
            let mut trial = s.clone();
            trial.push(cand);
            let ok = first_point_sums(&trial, mode)
                .iter()
                .all(|&v| !trial.contains(&v) && trial[1..].iter().all(|&e| v % e != 0));
            if ok {
                s = trial;
            }
        }
        return s;
    }
}

/// Overrides placing the ladder on `entries`: below the last entry only
/// the entries and multiples of `entries[1..]` keep the class, and the
/// first-point values are recolored.
fn ladder_overrides(entries: &[u64], mode: ExtractMode, class: Color) -> BTreeMap<BigUint, Color> {
    let top = *entries.last().expect("non-empty");
    let mut keep = vec![false; top as usize + 1];
    entries.iter().for_each(|&e| keep[e as usize] = true);
    for &e in &entries[1..] {
        (e..=top).step_by(e as usize).for_each(|m| keep[m as usize] = true);
    }
    let mut out: BTreeMap<BigUint, Color> =
        (mode.n() + 1..=top).filter(|&v| !keep[v as usize]).map(|v| (BigUint::from(v), 1 - class)).collect();
    for v in first_point_sums(entries, mode) {
        out.insert(BigUint::from(v), 1 - class);
    }
    out
}

/// A thick-class coloring adapted to `mode`.
///
/// Most seeds first place a sparse ladder whose first-point values all
/// avoid the class. Then the extraction is run repeatedly and the value at
/// its exit is recolored, so the next run continues further into the case
/// analysis.
pub fn adversarial(seed: u64, mode: ExtractMode) -> GeneratedColoring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (base, class, mut overrides) = thick_blocks(&mut rng);
    let plain = base.clone().into_coloring().expect("valid generated rule");
    let build = |ov: &BTreeMap<BigUint, Color>| Coloring::with_overrides(plain.clone(), ov.clone());
    let floor = BigUint::default();
    if rng.gen_bool(0.8) {
        let Rule::Blocks { base: l, .. } = base.rule else { unreachable!("blocks rule") };
        let entries = sparse_entries(&mut rng, l, ladder_shape(mode).0, mode);
        overrides = ladder_overrides(&entries, mode, class);
        if let ExtractMode::Tower { n } = mode {
            // Sums over consecutive (n+1)-blocks, which select the case split.
            if rng.gen_bool(0.5) {
                for block in entries.chunks_exact(n as usize + 1) {
                    let v: u64 = block.iter().sum();
                    if !entries.contains(&v) && entries[1..].iter().all(|&e| !v.is_multiple_of(e)) {
                        overrides.insert(BigUint::from(v), 1 - class);
                    }
                }
            }
        }
    }
    for _ in 0..MAX_ROUNDS {
        let c = build(&overrides);
        let w = ScanWitness::new(&c, class);
        let Ok(r) = extract(&c, &w, mode, &floor) else { break };
        let Some(last) = r.trace.steps.last() else { break };
        // Recolor the exit value into the other class, or stop.
        let p = if last.holds() { 0.5 } else { 0.9 };
        if last.observed != class || overrides.contains_key(&last.value) || protected(&r.ladder, &last.value) || !rng.gen_bool(p) {
            break;
        }
        overrides.insert(last.value.clone(), 1 - class);
    }
    let coloring = build(&overrides);
    GeneratedColoring { seed, base, class, overrides, coloring }
}
