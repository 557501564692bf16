mod common;

use common::extraction::{self, Outcome, MODES};
use monochrome::thick::{
    self, build_ladder, extract_tower, extract_xy_xny, generators, ExtractError, ExtractMode, LadderVariant, ScanWitness,
};
use monochrome::{Coloring, RuleSpec};
use num_bigint::BigUint;
use proptest::prelude::*;

fn rule(s: &str) -> Coloring {
    s.parse::<RuleSpec>().unwrap().into_coloring().unwrap()
}

#[test]
fn generated_extractions_recheck() {
    for mode in MODES {
        for seed in 0..6 {
            let (out, what) = extraction::run(seed, mode);
            match out {
                Outcome::Success { verified, replayed, ladder_ok, .. } => {
                    assert!(verified && replayed && ladder_ok, "{mode} {what}")
                }
                Outcome::Failure { evidence, .. } => assert!(evidence, "{mode} {what}"),
                Outcome::Other(e) => panic!("{mode} {what}: {e}"),
            }
        }
    }
}

#[test]
fn xy_xy_configuration_from_a_constant_class() {
    let c = rule("const:hi=10^7");
    let r = extract_xy_xny(&c, &ScanWitness::new(&c, 0), 1, &BigUint::default()).unwrap();
    let [x, y] = [&r.assignment[0], &r.assignment[1]];
    let want: Vec<BigUint> = {
        let mut v = vec![x.clone(), y.clone(), x * y, x + y];
        v.sort();
        v.dedup();
        v
    };
    assert_eq!(r.values.values(), &want[..]);
    assert_eq!(r.color, 0);
    assert_eq!(r.exit_point, 1);
}

#[test]
fn floor_pushes_the_configuration_up() {
    let c = rule("const:hi=10^200");
    let floor = BigUint::from(1_000_000u32);
    let r = extract_tower(&c, &ScanWitness::new(&c, 0), 2, &floor).unwrap();
    assert!(r.assignment.iter().all(|v| v > &floor));
    r.verify(&c).unwrap();
}

#[test]
fn failures_carry_evidence() {
    // The odd class has no dilation [1, 2]·a at all.
    let c = rule("parity:hi=10^6");
    match thick::extract(&c, &ScanWitness::new(&c, 1).with_budget(1000), ExtractMode::Xny { n: 1 }, &BigUint::default()) {
        Err(ExtractError::Witness(e)) => {
            assert_eq!(e.step, 1);
            assert_eq!(e.partial.entries.len(), 1);
        }
        other => panic!("{other:?}"),
    }
    // Domain too small for the bounds the ladder needs.
    let c = rule("const:hi=1000");
    assert!(thick::extract(&c, &ScanWitness::new(&c, 0), ExtractMode::Tower { n: 2 }, &BigUint::default()).is_err());
    assert!(matches!(
        extract_tower(&c, &ScanWitness::new(&c, 0), 1, &BigUint::default()),
        Err(ExtractError::Parameter(1))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ladders_pass_a_direct_recheck(l in 4u64..=64, g in 1u64..=4, noise in 0u64..=300, seed in any::<u64>(), n in 1u64..=3) {
        let width = (1024.0 / (l as f64).log2()).ceil() as u64;
        let c = rule(&format!("blocks:L={l},w={width},g={g},noise={noise},seed={seed}"));
        let w = ScanWitness::new(&c, 0);
        let ladder = build_ladder(&w, n, 5, LadderVariant::Squares, &BigUint::default()).unwrap();
        prop_assert!(ladder.recheck(&c).is_ok());
        prop_assert!(ladder.entries.windows(2).all(|p| p[0] < p[1]));
        prop_assert!(ladder.entries[0] > BigUint::from(n));
    }

    #[test]
    fn successful_xny_extractions_are_monochromatic(seed in 0u64..10_000, n in 1u64..=3) {
        let mode = ExtractMode::Xny { n };
        let g = generators::adversarial(seed, mode);
        if let Ok(r) = thick::extract(&g.coloring, &ScanWitness::new(&g.coloring, g.class), mode, &BigUint::default()) {
            let (x, y) = (&r.assignment[0], &r.assignment[1]);
            for v in [x.clone(), y.clone(), x * y, x + y * n] {
                prop_assert_eq!(g.coloring.color_of(&v).unwrap(), r.color);
            }
            prop_assert!(r.trace.replay(&g.coloring).is_ok());
        }
    }
}
