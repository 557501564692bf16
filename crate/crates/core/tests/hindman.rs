mod common;

use monochrome::hindman::{
    self, bridge_sum_product, enumerate_pos_values, find_vdw_step, products_of_sums, SetSequence, VdwQuery,
};
use monochrome::{Coloring, InstanceValues};
use num_bigint::BigUint;
use proptest::prelude::*;

#[test]
fn structures_match_brute_force_on_small_intervals() {
    for n in 1..=8u64 {
        for sizes in common::profiles(3) {
            let candidates = common::structure_candidates(1, n, &sizes, false);
            for bits in 0..1u64 << n {
                let colors: Vec<u8> = (0..n).map(|k| (bits >> k & 1) as u8).collect();
                let c = Coloring::explicit(1, &colors).unwrap();
                let got = hindman::find_structure(&c, &sizes).map(|s| (s.color, s.seq.sets().to_vec()));
                assert_eq!(got, common::brute_structure(&candidates, 1, &colors, false), "n={n} sizes={sizes:?} bits={bits:b}");
            }
        }
    }
}

#[test]
fn bichromatic_structures_match_brute_force() {
    for n in 2..=8u64 {
        for profile in common::profiles(3).into_iter().filter(|p| p.len() >= 2) {
            let candidates = common::structure_candidates(1, n, &profile, true);
            for bits in 0..1u64 << n {
                let colors: Vec<u8> = (0..n).map(|k| (bits >> k & 1) as u8).collect();
                let c = Coloring::explicit(1, &colors).unwrap();
                let got = hindman::find_bichromatic_structure(&c, profile[0], &profile[1..]).map(|s| {
                    let mut sets = vec![s.seq.s0().unwrap().to_vec()];
                    sets.extend(s.seq.sets().iter().cloned());
                    (s.color, sets)
                });
                assert_eq!(got, common::brute_structure(&candidates, 1, &colors, true), "n={n} {profile:?} bits={bits:b}");
            }
        }
    }
}

#[test]
fn found_structures_verify() {
    let c = "blocks:L=10,w=3,g=1,hi=10^6".parse::<monochrome::RuleSpec>().unwrap().into_coloring().unwrap();
    let c = Coloring::explicit(1, &(1..=3000u64).map(|v| c.color_of_u64(v).unwrap()).collect::<Vec<_>>()).unwrap();
    let s = hindman::find_structure(&c, &[2, 1]).unwrap();
    assert!(hindman::verify_structure(&c, &s));
    for (_, v) in enumerate_pos_values(&s.seq).unwrap() {
        let vals = InstanceValues::new(vec![v]).unwrap();
        assert_eq!(c.monochromatic_color(&vals).unwrap(), Some(s.color));
    }
}

#[test]
fn degenerate_products_of_sums() {
    let one = SetSequence::new(vec![vec![3, 5, 9]]).unwrap();
    assert_eq!(products_of_sums(&one, &[3, 9]).unwrap(), BigUint::from(12u32));
    let singles = SetSequence::new(vec![vec![3], vec![5], vec![9]]).unwrap();
    assert_eq!(products_of_sums(&singles, &[3, 5, 9]).unwrap(), BigUint::from(135u32));
    assert!(SetSequence::new(vec![vec![2], vec![2]]).is_err());
}

fn disjoint_sets() -> impl Strategy<Value = (Vec<u64>, Vec<Vec<u64>>)> {
    (prop::collection::btree_set(1u64..10_000, 2..16), 1usize..5).prop_map(|(all, m)| {
        let all: Vec<u64> = all.into_iter().collect();
        let s0_len = 1 + all.len() / (m + 1);
        let (s0, rest) = all.split_at(s0_len);
        let mut sets: Vec<Vec<u64>> = vec![Vec::new(); m];
        for (i, &e) in rest.iter().enumerate() {
            sets[i % m].push(e);
        }
        sets.retain(|s| !s.is_empty());
        (s0.to_vec(), sets)
    })
}

proptest! {
    #[test]
    fn bridge_sum_equals_product((s0, sets) in disjoint_sets(), pick in any::<u64>()) {
        let choices: Vec<u64> = sets.iter().enumerate().map(|(i, s)| s[(pick as usize >> i) % s.len()]).collect();
        let seq = SetSequence::with_s0(s0.clone(), sets.clone()).unwrap();
        match bridge_sum_product(&seq, &choices) {
            Ok(pair) => {
                prop_assert_eq!(pair.sum_f(), pair.product_g());
                prop_assert_eq!(pair.f.len(), s0.len());
                prop_assert_eq!(pair.g.len(), sets.len() + 1);
            }
            Err(hindman::HindmanError::Degenerate(_)) => {
                let b: u64 = s0.iter().sum();
                prop_assert!(choices.contains(&b));
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn vdw_step_matches_scan(
        a in prop::collection::btree_set(1u64..=500, 0..120),
        steps in prop::collection::vec(1u64..60, 1..=6),
        lo in 1u64..50, hi in 100u64..=500, k in 1u32..4, tau in 0.01f64..1.0,
    ) {
        let a: Vec<u64> = a.into_iter().collect();
        let q = VdwQuery { lo, hi, k, tau };
        prop_assert_eq!(find_vdw_step(&a, &steps, &q), common::scan_vdw(&a, &steps, lo, hi, k, tau));
    }
}
