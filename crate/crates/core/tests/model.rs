mod common;

use std::collections::BTreeSet;

use monochrome::{builtin, Assignment, Coloring, InstanceValues, Params};
use num_bigint::BigUint;
use proptest::prelude::*;

fn as_u64(v: &InstanceValues) -> Vec<u64> {
    v.to_u64().unwrap()
}

#[test]
fn enumeration_matches_nested_loops() {
    let mut all = common::suite();
    all.push(builtin::bound("tower3", &Params::new()).unwrap());
    for bound in &all {
        for (lo, hi) in [(1, 30), (2, 30), (5, 17)] {
            let got: BTreeSet<(Vec<u64>, Vec<u64>)> = bound
                .enumerate_with(lo, hi, false)
                .unwrap()
                .map(|(a, v)| (a.values.iter().map(|x| u64::try_from(x).unwrap()).collect(), as_u64(&v)))
                .collect();
            let want: BTreeSet<_> = common::oracle_instances(bound, lo, hi).into_iter().collect();
            assert_eq!(got, want, "{} on [{lo}, {hi}]", bound.id());
        }
    }
}

#[test]
fn canonical_enumeration_keeps_every_value_set() {
    for bound in common::suite() {
        let canonical: BTreeSet<Vec<u64>> = bound.enumerate(1, 30).unwrap().map(|(_, v)| as_u64(&v)).collect();
        let full: BTreeSet<Vec<u64>> = bound.enumerate_with(1, 30, false).unwrap().map(|(_, v)| as_u64(&v)).collect();
        assert_eq!(canonical, full, "{}", bound.id());
        let sets: BTreeSet<Vec<u64>> = bound.value_sets(1, 30).unwrap().into_iter().collect();
        assert_eq!(sets, full, "{}", bound.id());
    }
}

#[test]
fn symmetric_forms_are_enumerated_once() {
    let xyxy = builtin::bound("xyxy", &Params::new()).unwrap();
    let pairs: Vec<Vec<u64>> = xyxy
        .enumerate(1, 30)
        .unwrap()
        .map(|(a, _)| a.values.iter().map(|x| u64::try_from(x).unwrap()).collect())
        .collect();
    assert!(pairs.iter().all(|a| a[0] <= a[1]));
    let xny = builtin::bound("xny", &Params::new().with("n", 2)).unwrap();
    assert!(xny.enumerate(1, 30).unwrap().any(|(a, _)| a.values[0] > a.values[1]));
}

fn suite_index() -> impl Strategy<Value = usize> {
    0..common::suite().len()
}

proptest! {
    #[test]
    fn instantiation_is_pure_and_deduplicated(i in suite_index(), x in 1u64..200, y in 1u64..200, z in 1u64..200) {
        let bound = &common::suite()[i];
        let a = Assignment::from_u64(&[x, y, z][..bound.arity()]);
        let first = bound.instantiate(&a);
        prop_assert_eq!(&first, &bound.instantiate(&a));
        if let Ok(v) = first {
            prop_assert!(v.len() <= bound.forms().len());
            prop_assert!(v.values().windows(2).all(|w| w[0] < w[1]));
            for f in bound.forms() {
                prop_assert!(v.values().contains(&f.eval(&a.values)));
            }
        }
    }

    #[test]
    fn monochromatic_color_matches_definition(colors in prop::collection::vec(0u8..=1, 1..64), picks in prop::collection::btree_set(0usize..64, 1..6)) {
        let c = Coloring::explicit(1, &colors).unwrap();
        let picks: Vec<u64> = picks.into_iter().filter(|&p| p < colors.len()).map(|p| p as u64 + 1).collect();
        prop_assume!(!picks.is_empty());
        let v = InstanceValues::from_u64(&picks).unwrap();
        let seen: BTreeSet<u8> = picks.iter().map(|&p| colors[p as usize - 1]).collect();
        let want = if seen.len() == 1 { seen.into_iter().next() } else { None };
        prop_assert_eq!(c.monochromatic_color(&v).unwrap(), want);
    }

    #[test]
    fn rule_colorings_are_pure(l in 2u64..40, w in 1u64..4, g in 1u64..4, v in 1u64..1_000_000) {
        let spec = format!("blocks:L={l},w={w},g={g},hi=10^9");
        let c1 = spec.parse::<monochrome::RuleSpec>().unwrap().into_coloring().unwrap();
        let c2 = spec.parse::<monochrome::RuleSpec>().unwrap().into_coloring().unwrap();
        let v = BigUint::from(v);
        prop_assert_eq!(c1.color_of(&v).unwrap(), c2.color_of(&v).unwrap());
    }
}
