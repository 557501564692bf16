use std::collections::BTreeSet;

use crate::model::{BoundTemplate, ModelError};

/// Deduplicated instance value sets over `[lo, hi]`, as offsets from `lo`.
///
/// Sets are ordered by their maximum, then lexicographically; this is the
/// order in which both the solver and the CNF encoder consume them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceIndex {
    lo: u64,
    hi: u64,
    sets: Vec<Vec<u32>>,
    raw_count: usize,
}

impl InstanceIndex {
    pub fn build(bound: &BoundTemplate, lo: u64, hi: u64) -> Result<InstanceIndex, ModelError> {
        let raw = bound.value_sets(lo, hi)?;
        let raw_count = raw.len();
        let unique: BTreeSet<Vec<u32>> =
            raw.into_iter().map(|vals| vals.iter().map(|&v| (v - lo) as u32).collect()).collect();
        let mut sets: Vec<Vec<u32>> = unique.into_iter().collect();
        sets.sort_by(|a, b| a.last().cmp(&b.last()).then_with(|| a.cmp(b)));
        Ok(InstanceIndex { lo, hi, sets, raw_count })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    /// Number of integers in the interval.
    pub fn width(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    /// Instances before value-set deduplication.
    pub fn raw_count(&self) -> usize {
        self.raw_count
    }

    /// First value set with a single element, as an integer.
    pub fn singleton(&self) -> Option<u64> {
        self.sets.iter().find(|s| s.len() == 1).map(|s| self.lo + s[0] as u64)
    }
}
