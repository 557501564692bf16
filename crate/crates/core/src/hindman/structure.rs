use num_traits::ToPrimitive;

use super::{enumerate_pos_values, SetSequence};
use crate::model::{Color, Coloring};

/// Sets whose products of block sums all have color `color`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub color: Color,
    pub seq: SetSequence,
}

/// Sets for which a product of block sums has color `color` when the
/// selection meets `S_0` and color `1 - color` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BichromaticStructure {
    pub color: Color,
    pub seq: SetSequence,
}

struct Search<'a> {
    coloring: &'a Coloring,
    lo: u64,
    hi: u64,
    sizes: Vec<usize>,
    split: bool,
    target: Option<Color>,
    chosen: Vec<Vec<u64>>,
}

/// Products of earlier block sums: `(value, meets S_0, empty selection)`.
type Closed = Vec<(u64, bool, bool)>;

impl Search<'_> {
    fn used(&self, e: u64) -> bool {
        self.chosen.iter().any(|b| b.contains(&e))
    }

    fn wanted(&self, meets_s0: bool) -> Color {
        let i = self.target.expect("target fixed by the first element");
        if !self.split || meets_s0 {
            i
        } else {
            1 - i
        }
    }

    fn dfs(&mut self, block: usize, closed: &Closed, sums: &[u64], start: u64) -> bool {
        if self.chosen[block].len() == self.sizes[block] {
            let is_s0 = self.split && block == 0;
            let mut next: Closed = Vec::with_capacity(closed.len() * sums.len());
            for &(p, met, empty) in closed {
                for &q in sums {
                    if q == 0 {
                        next.push((p, met, empty));
                    } else {
                        next.push((p * q, met || is_s0, false));
                    }
                }
            }
            if block + 1 == self.sizes.len() {
                return true;
            }
            return self.dfs(block + 1, &next, &[0], self.lo);
        }
        let is_s0 = self.split && block == 0;
        let mut e = start;
        'candidates: while e <= self.hi {
            if self.used(e) {
                e += 1;
                continue;
            }
            let first = self.target.is_none();
            if first {
                self.target = Some(self.coloring.color_of_u64(e).expect("in domain"));
            }
            // Values gained by adding `e`; all grow with `e`, so leaving the
            // domain ends the scan.
            let mut ok = true;
            for &(p, met, _) in closed {
                for &q in sums {
                    let v = match (q + e).checked_mul(p) {
                        Some(v) if v <= self.hi => v,
                        _ => {
                            if first {
                                self.target = None;
                            }
                            break 'candidates;
                        }
                    };
                    if ok && self.coloring.color_of_u64(v).expect("in domain") != self.wanted(met || is_s0) {
                        ok = false;
                    }
                }
            }
            if ok {
                let grown: Vec<u64> = sums.iter().copied().chain(sums.iter().map(|q| q + e)).collect();
                self.chosen[block].push(e);
                if self.dfs(block, closed, &grown, e + 1) {
                    return true;
                }
                self.chosen[block].pop();
            }
            if first {
                self.target = None;
            }
            e += 1;
        }
        false
    }
}

fn domain(c: &Coloring) -> Option<(u64, u64)> {
    Some((c.lo().to_u64()?, c.hi().to_u64()?))
}

fn run(c: &Coloring, sizes: Vec<usize>, split: bool) -> Option<(Color, Vec<Vec<u64>>)> {
    let (lo, hi) = domain(c)?;
    if sizes.iter().all(|&s| s == 0) {
        return None;
    }
    let mut s = Search { coloring: c, lo, hi, chosen: vec![Vec::new(); sizes.len()], sizes, split, target: None };
    if s.dfs(0, &vec![(1, false, true)], &[0], lo) {
        Some((s.target.expect("set"), s.chosen))
    } else {
        None
    }
}

/// Least sets `S_1, ..., S_k` with `|S_i| = sizes[i]` whose products of
/// block sums all lie in the domain and share one color.
///
/// Sets are compared as the concatenation of their increasing tuples.
pub fn find_structure(c: &Coloring, sizes: &[usize]) -> Option<Structure> {
    let (color, sets) = run(c, sizes.to_vec(), false)?;
    Some(Structure { color, seq: SetSequence::new(sets).expect("disjoint by construction") })
}

/// Least `S_0, S_1, ..., S_k` such that selections meeting `S_0` take one
/// color and all other selections the other.
pub fn find_bichromatic_structure(c: &Coloring, size0: usize, sizes: &[usize]) -> Option<BichromaticStructure> {
    if size0 == 0 {
        return None;
    }
    let mut all = vec![size0];
    all.extend_from_slice(sizes);
    let (color, mut sets) = run(c, all, true)?;
    let s0 = sets.remove(0);
    Some(BichromaticStructure { color, seq: SetSequence::with_s0(s0, sets).expect("disjoint by construction") })
}

fn color_table(c: &Coloring, seq: &SetSequence) -> Option<Vec<(Vec<u64>, bool, Color)>> {
    let s0 = seq.s0().unwrap_or(&[]);
    let rows = enumerate_pos_values(seq).ok()?;
    rows.into_iter()
        .map(|(f, v)| {
            let meets = f.iter().any(|e| s0.contains(e));
            c.color_of(&v).ok().map(|col| (f, meets, col))
        })
        .collect()
}

/// Recheck a structure by enumerating every selection.
pub fn verify_structure(c: &Coloring, s: &Structure) -> bool {
    s.seq.s0().is_none()
        && color_table(c, &s.seq).is_some_and(|rows| rows.iter().all(|(_, _, col)| *col == s.color))
}

pub fn verify_bichromatic(c: &Coloring, s: &BichromaticStructure) -> bool {
    s.seq.s0().is_some_and(|s0| !s0.is_empty())
        && color_table(c, &s.seq).is_some_and(|rows| {
            rows.iter().all(|(_, meets, col)| *col == if *meets { s.color } else { 1 - s.color })
        })
}
