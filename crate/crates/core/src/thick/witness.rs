use num_bigint::BigUint;
use num_traits::One;

use crate::model::{Color, Coloring, Containment};

/// Default number of candidates a witness examines per request.
pub const DEFAULT_CANDIDATE_BUDGET: u64 = 200_000;

/// One answered or failed request.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessQuery {
    /// Least acceptable answer.
    pub from: BigUint,
    /// The request is for `[1, bound]·a`.
    pub bound: BigUint,
    pub answer: Option<BigUint>,
    /// Candidates examined and rejected.
    pub rejected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessFailure {
    /// Every remaining candidate pushes `a·bound` past the domain.
    Domain { first_overflow: BigUint },
    /// The candidate budget ran out; the last rejection and why.
    Budget { last: BigUint, violation: Option<BigUint> },
}

/// Finds `a` in one color class with `[1, P]·a` inside that class.
pub trait ThicknessWitness {
    fn class(&self) -> Color;

    /// Least `a >= from` with `{a, 2a, ..., bound·a}` in the class and in
    /// the domain.
    fn request(&self, from: &BigUint, bound: &BigUint) -> (WitnessQuery, Result<BigUint, WitnessFailure>);
}

/// A witness that scans candidates in increasing order, jumping over runs
/// of the other color when the coloring describes them.
pub struct ScanWitness<'a> {
    coloring: &'a Coloring,
    class: Color,
    budget: u64,
}

impl<'a> ScanWitness<'a> {
    pub fn new(coloring: &'a Coloring, class: Color) -> ScanWitness<'a> {
        ScanWitness { coloring, class, budget: DEFAULT_CANDIDATE_BUDGET }
    }

    pub fn with_budget(mut self, budget: u64) -> ScanWitness<'a> {
        self.budget = budget;
        self
    }
}

impl ThicknessWitness for ScanWitness<'_> {
    fn class(&self) -> Color {
        self.class
    }

    fn request(&self, from: &BigUint, bound: &BigUint) -> (WitnessQuery, Result<BigUint, WitnessFailure>) {
        let c = self.coloring;
        let mut a = from.max(c.lo()).clone();
        let mut rejected = 0u64;
        let mut last_violation = None;
        let query = |answer: Option<BigUint>, rejected| WitnessQuery { from: from.clone(), bound: bound.clone(), answer, rejected };
        loop {
            if &a * bound > *c.hi() {
                let q = query(None, rejected);
                return (q, Err(WitnessFailure::Domain { first_overflow: &a * bound }));
            }
            if rejected >= self.budget {
                let q = query(None, rejected);
                return (q, Err(WitnessFailure::Budget { last: a, violation: last_violation }));
            }
            // Skip a run of the other color in one step.
            if let Some((_, end, color)) = c.run_at(&a) {
                if color != self.class {
                    rejected += 1;
                    match c.next_run_of(&(end + 1u32), self.class) {
                        Some((start, _)) => {
                            a = start;
                            continue;
                        }
                        None => {
                            a += 1u32;
                            continue;
                        }
                    }
                }
            }
            if !c.color_of(&a).is_ok_and(|col| col == self.class) {
                last_violation = Some(a.clone());
                rejected += 1;
                a += BigUint::one();
                continue;
            }
            match c.dilation_contained(&a, bound, self.class) {
                Containment::Yes => return (query(Some(a.clone()), rejected), Ok(a)),
                Containment::No(v) => last_violation = Some(v),
                Containment::Unknown => last_violation = None,
            }
            rejected += 1;
            a += BigUint::one();
        }
    }
}
