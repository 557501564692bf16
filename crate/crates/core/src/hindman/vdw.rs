use num_traits::ToPrimitive;

use super::finite_sums;
use crate::bits::BitSet;

/// A step query: find `d ∈ FS(steps)` with many `x` such that
/// `x, x + d, ..., x + k·d` all lie in the set.
#[derive(Debug, Clone, PartialEq)]
pub struct VdwQuery {
    pub lo: u64,
    pub hi: u64,
    pub k: u32,
    /// Required fraction of the set's size, in `(0, 1]`.
    pub tau: f64,
}

/// Least `d ∈ FS(steps)` for which `⋂_{0≤i≤k} (A − i·d) ∩ [lo, hi]` has at
/// least `tau·|A|` elements. `A` is restricted to `[lo, hi]`; an empty `A`
/// has no step.
pub fn find_vdw_step(a: &[u64], steps: &[u64], q: &VdwQuery) -> Option<(u64, usize)> {
    if q.lo > q.hi {
        return None;
    }
    let width = (q.hi - q.lo + 1) as usize;
    let mut set = BitSet::new(width);
    for &x in a.iter().filter(|&&x| x >= q.lo && x <= q.hi) {
        set.set((x - q.lo) as usize, true);
    }
    let size = set.count_ones();
    if size == 0 {
        return None;
    }
    let need = q.tau * size as f64;
    for d in finite_sums(steps) {
        let Some(d) = d.to_usize() else { break };
        let mut meet = set.clone();
        for i in 1..=q.k as usize {
            let Some(shift) = d.checked_mul(i) else {
                meet = BitSet::new(width);
                break;
            };
            meet.and_shifted(&set, shift);
        }
        let count = meet.count_ones();
        if count as f64 >= need {
            return Some((d as u64, count));
        }
    }
    None
}
