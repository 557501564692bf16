use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::One;

use super::{HindmanError, SetSequence};

/// Sets `F`, `G` with `ΣF = ∏G`, plus the scalars used to build them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgePair {
    pub f: Vec<BigUint>,
    pub g: Vec<BigUint>,
    /// Product of the chosen elements.
    pub a: BigUint,
    /// Sum of `S_0`.
    pub b: BigUint,
}

impl BridgePair {
    pub fn sum_f(&self) -> BigUint {
        self.f.iter().sum()
    }

    pub fn product_g(&self) -> BigUint {
        self.g.iter().product()
    }
}

/// With `a` the product of one chosen element from each of `S_1..S_m` and
/// `b = ΣS_0`, return `F = a·S_0` and `G = {b, s_1, ..., s_m}`.
pub fn bridge_sum_product(seq: &SetSequence, choices: &[u64]) -> Result<BridgePair, HindmanError> {
    let s0 = seq.s0().filter(|s| !s.is_empty()).ok_or_else(|| HindmanError::Degenerate("S_0 is missing or empty".into()))?;
    if choices.len() != seq.sets().len() {
        return Err(HindmanError::Degenerate(format!(
            "{} choices for {} sets",
            choices.len(),
            seq.sets().len()
        )));
    }
    for (set, &s) in seq.sets().iter().zip(choices) {
        if !set.contains(&s) {
            return Err(HindmanError::NotInSequence(s));
        }
    }
    let a: BigUint = choices.iter().map(|&s| BigUint::from(s)).product();
    let b: BigUint = s0.iter().map(|&s| BigUint::from(s)).sum();
    let mut g = vec![b.clone()];
    g.extend(choices.iter().map(|&s| BigUint::from(s)));
    let distinct: BTreeSet<&BigUint> = g.iter().collect();
    if distinct.len() != g.len() {
        return Err(HindmanError::Degenerate(format!("b = {b} coincides with a chosen element")));
    }
    let f: Vec<BigUint> = s0.iter().map(|&s| &a * s).collect();
    let pair = BridgePair { f, g, a, b };
    assert_eq!(pair.sum_f(), pair.product_g(), "sum of F equals product of G");
    debug_assert!(pair.a >= BigUint::one());
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn builds_pairs() {
        let seq = SetSequence::with_s0(vec![1, 2], vec![vec![4]]).unwrap();
        let p = bridge_sum_product(&seq, &[4]).unwrap();
        assert_eq!((p.a.clone(), p.b.clone()), (BigUint::from(4u32), BigUint::from(3u32)));
        assert_eq!(p.g, big(&[3, 4]));
        assert_eq!(p.f, big(&[4, 8]));
        assert_eq!(p.sum_f(), BigUint::from(12u32));

        let seq = SetSequence::with_s0(vec![5], vec![vec![2]]).unwrap();
        let p = bridge_sum_product(&seq, &[2]).unwrap();
        assert_eq!(p.g, big(&[5, 2]));
        assert_eq!(p.f, big(&[10]));
    }

    #[test]
    fn collision_is_degenerate() {
        let seq = SetSequence::with_s0(vec![1, 2], vec![vec![3]]).unwrap();
        assert!(matches!(bridge_sum_product(&seq, &[3]), Err(HindmanError::Degenerate(_))));
    }
}
