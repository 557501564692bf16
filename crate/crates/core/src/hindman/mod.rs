//! Finite sums and products, products of block sums, and bounded searches
//! for structures whose products of block sums share a color.

mod bridge;
mod structure;
mod vdw;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

pub use bridge::{bridge_sum_product, BridgePair};
pub use structure::{
    find_bichromatic_structure, find_structure, verify_bichromatic, verify_structure, BichromaticStructure, Structure,
};
pub use vdw::{find_vdw_step, VdwQuery};

/// Most elements a sequence may have when all subsets are enumerated.
pub const MAX_POS_ELEMENTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HindmanError {
    #[error("element 0 is not a positive integer")]
    NonPositive,
    #[error("{0} occurs in more than one set")]
    NotDisjoint(u64),
    #[error("set {index} has {got} elements, expected {expected}")]
    Size { index: usize, expected: usize, got: usize },
    #[error("the selection is empty")]
    EmptySelection,
    #[error("{0} is not an element of any set")]
    NotInSequence(u64),
    #[error("{got} elements exceed the enumeration cap of {cap}")]
    TooLarge { got: usize, cap: usize },
    #[error("{0}")]
    Degenerate(String),
}

/// All sums of non-empty subsets of `s`, sorted and deduplicated.
pub fn finite_sums(s: &[u64]) -> Vec<BigUint> {
    subset_closure(s, |a, b| a + b)
}

/// All products of non-empty subsets of `s`, sorted and deduplicated.
pub fn finite_products(s: &[u64]) -> Vec<BigUint> {
    subset_closure(s, |a, b| a * b)
}

fn subset_closure(s: &[u64], op: impl Fn(&BigUint, &BigUint) -> BigUint) -> Vec<BigUint> {
    let distinct: BTreeSet<u64> = s.iter().copied().collect();
    let mut acc: BTreeSet<BigUint> = BTreeSet::new();
    for &e in &distinct {
        let e = BigUint::from(e);
        let grown: Vec<BigUint> = acc.iter().map(|v| op(v, &e)).collect();
        acc.insert(e);
        acc.extend(grown);
    }
    acc.into_iter().collect()
}

/// Disjoint finite sets `S_1, S_2, ...`, optionally preceded by a
/// distinguished set `S_0`. Each set is kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetSequence {
    s0: Option<Vec<u64>>,
    sets: Vec<Vec<u64>>,
}

impl SetSequence {
    pub fn new(sets: Vec<Vec<u64>>) -> Result<SetSequence, HindmanError> {
        SetSequence::build(None, sets)
    }

    pub fn with_s0(s0: Vec<u64>, sets: Vec<Vec<u64>>) -> Result<SetSequence, HindmanError> {
        SetSequence::build(Some(s0), sets)
    }

    fn build(s0: Option<Vec<u64>>, sets: Vec<Vec<u64>>) -> Result<SetSequence, HindmanError> {
        let norm = |mut v: Vec<u64>| {
            v.sort_unstable();
            v
        };
        let seq = SetSequence { s0: s0.map(norm), sets: sets.into_iter().map(norm).collect() };
        let mut seen = BTreeSet::new();
        for block in seq.blocks() {
            for (j, &e) in block.iter().enumerate() {
                if e == 0 {
                    return Err(HindmanError::NonPositive);
                }
                if (j > 0 && block[j - 1] == e) || !seen.insert(e) {
                    return Err(HindmanError::NotDisjoint(e));
                }
            }
        }
        Ok(seq)
    }

    /// Check the declared size profile of `S_1, S_2, ...`.
    pub fn check_sizes(&self, sizes: &[usize]) -> Result<(), HindmanError> {
        if sizes.len() != self.sets.len() {
            return Err(HindmanError::Size { index: sizes.len().min(self.sets.len()) + 1, expected: sizes.len(), got: self.sets.len() });
        }
        for (i, (set, &want)) in self.sets.iter().zip(sizes).enumerate() {
            if set.len() != want {
                return Err(HindmanError::Size { index: i + 1, expected: want, got: set.len() });
            }
        }
        Ok(())
    }

    pub fn s0(&self) -> Option<&[u64]> {
        self.s0.as_deref()
    }

    pub fn sets(&self) -> &[Vec<u64>] {
        &self.sets
    }

    /// `S_0` (when present) followed by `S_1, S_2, ...`.
    pub fn blocks(&self) -> impl Iterator<Item = &[u64]> {
        self.s0.iter().map(|v| v.as_slice()).chain(self.sets.iter().map(|v| v.as_slice()))
    }

    /// All elements in block order.
    pub fn elements(&self) -> Vec<u64> {
        self.blocks().flatten().copied().collect()
    }

    /// Lines `S<i>: e1 e2 ...`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, i: usize, s: &[u64]| {
            let body: Vec<String> = s.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("S{i}: {}\n", body.join(" ")));
        };
        if let Some(s0) = &self.s0 {
            line(&mut out, 0, s0);
        }
        for (i, s) in self.sets.iter().enumerate() {
            line(&mut out, i + 1, s);
        }
        out
    }
}

impl fmt::Display for SetSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `∏ Σ (F ∩ B)` over the blocks `B` that meet `F`.
pub fn products_of_sums(seq: &SetSequence, f: &[u64]) -> Result<BigUint, HindmanError> {
    if f.is_empty() {
        return Err(HindmanError::EmptySelection);
    }
    let chosen: BTreeSet<u64> = f.iter().copied().collect();
    let all: BTreeSet<u64> = seq.elements().into_iter().collect();
    if let Some(&e) = chosen.iter().find(|e| !all.contains(e)) {
        return Err(HindmanError::NotInSequence(e));
    }
    let mut value = BigUint::one();
    for block in seq.blocks() {
        let sum: BigUint = block.iter().filter(|e| chosen.contains(e)).map(|&e| BigUint::from(e)).sum();
        if !sum.is_zero() {
            value *= sum;
        }
    }
    Ok(value)
}

/// Every non-empty selection with its value, selections ordered by their
/// bitmask over the elements in block order.
pub fn enumerate_pos_values(seq: &SetSequence) -> Result<Vec<(Vec<u64>, BigUint)>, HindmanError> {
    let elems = seq.elements();
    if elems.len() > MAX_POS_ELEMENTS {
        return Err(HindmanError::TooLarge { got: elems.len(), cap: MAX_POS_ELEMENTS });
    }
    let mut out = Vec::with_capacity((1usize << elems.len()).saturating_sub(1));
    for mask in 1u32..(1u32 << elems.len()) {
        let f: Vec<u64> = elems.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let v = products_of_sums(seq, &f)?;
        out.push((f, v));
    }
    Ok(out)
}
