use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use super::witness::{ThicknessWitness, WitnessFailure, WitnessQuery};
use crate::model::{Color, Coloring, Containment};

/// How the multiplier bound grows along the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderVariant {
    /// `P_i = n²·a_0²···a_i²`.
    Squares,
    /// `P_i = a_0^n···a_i^n`.
    Powers,
}

impl fmt::Display for LadderVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LadderVariant::Squares => "squares",
            LadderVariant::Powers => "powers",
        })
    }
}

/// `a_0 < a_1 < ... < a_d` in one class with `[1, P_i]·a_{i+1}` inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ladder {
    pub variant: LadderVariant,
    pub n: u64,
    pub class: Color,
    pub entries: Vec<BigUint>,
    /// `bounds[i] = P_i`, the multiplier bound for `entries[i + 1]`.
    pub bounds: Vec<BigUint>,
    pub queries: Vec<WitnessQuery>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderError {
    /// Index of the entry that could not be found.
    pub step: usize,
    pub partial: Ladder,
    pub failure: WitnessFailure,
}

impl fmt::Display for LadderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            WitnessFailure::Domain { first_overflow } => {
                write!(f, "witness failure at ladder step {}: multiples reach {} beyond the domain", self.step, first_overflow)
            }
            WitnessFailure::Budget { last, violation } => {
                write!(f, "witness failure at ladder step {}: candidate budget exhausted at {}", self.step, last)?;
                if let Some(v) = violation {
                    write!(f, " (last violation {v})")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for LadderError {}

fn next_bound(variant: LadderVariant, n: u64, prev: Option<&BigUint>, a: &BigUint) -> BigUint {
    match variant {
        LadderVariant::Squares => {
            let start = prev.cloned().unwrap_or_else(|| BigUint::from(n) * n);
            start * a * a
        }
        LadderVariant::Powers => {
            let start = prev.cloned().unwrap_or_else(BigUint::one);
            start * a.pow(n as u32)
        }
    }
}

impl Ladder {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Recheck every containment against the coloring itself.
    pub fn recheck(&self, c: &Coloring) -> Result<(), (usize, Containment)> {
        if let Some(a0) = self.entries.first() {
            match c.color_of(a0) {
                Ok(col) if col == self.class => {}
                _ => return Err((0, Containment::No(a0.clone()))),
            }
        }
        for (i, w) in self.entries.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err((i + 1, Containment::No(w[1].clone())));
            }
            let expect = next_bound(self.variant, self.n, i.checked_sub(1).map(|j| &self.bounds[j]), &w[0]);
            if expect != self.bounds[i] {
                return Err((i + 1, Containment::Unknown));
            }
            match c.dilation_contained(&w[1], &self.bounds[i], self.class) {
                Containment::Yes => {}
                other => return Err((i + 1, other)),
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = format!("ladder: variant={} n={} class={} entries={}\n", self.variant, self.n, self.class, self.len());
        for (i, a) in self.entries.iter().enumerate() {
            out.push_str(&format!("ladder-entry: a_{i}={a}\n"));
        }
        for (i, q) in self.queries.iter().enumerate() {
            let answer = q.answer.as_ref().map_or("none".to_string(), |a| a.to_string());
            out.push_str(&format!(
                "witness-query: step={i} from={} bound={} answer={answer} rejected={}\n",
                q.from, q.bound, q.rejected
            ));
        }
        out
    }
}

/// Build `entries` ladder entries, each the least admissible choice.
///
/// `a_0` is the least class member above `max(n, floor)`; it is requested
/// with bound 1.
#[allow(clippy::result_large_err)]
pub fn build_ladder(
    witness: &dyn ThicknessWitness,
    n: u64,
    entries: usize,
    variant: LadderVariant,
    floor: &BigUint,
) -> Result<Ladder, LadderError> {
    let mut ladder = Ladder { variant, n, class: witness.class(), entries: Vec::new(), bounds: Vec::new(), queries: Vec::new() };
    let start = floor.max(&BigUint::from(n)).clone() + 1u32;
    let mut from = start;
    let mut bound = BigUint::one();
    for step in 0..entries {
        let (query, result) = witness.request(&from, &bound);
        ladder.queries.push(query);
        match result {
            Ok(a) => {
                let prev = ladder.bounds.last();
                let next = next_bound(variant, n, prev, &a);
                from = &a + 1u32;
                ladder.entries.push(a);
                if step + 1 < entries {
                    ladder.bounds.push(next.clone());
                }
                bound = next;
            }
            Err(failure) => return Err(LadderError { step, partial: ladder, failure }),
        }
    }
    Ok(ladder)
}
