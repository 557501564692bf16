use num_bigint::BigUint;

use crate::model::{Color, Coloring};

/// One tested assumption: `value` was expected to have color `expected`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    /// Number of the case-analysis point in the proof being followed.
    pub point: u8,
    pub label: String,
    pub value: BigUint,
    pub expected: Color,
    pub observed: Color,
}

impl TraceStep {
    pub fn holds(&self) -> bool {
        self.expected == self.observed
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayMismatch {
    pub index: usize,
    pub observed_now: Option<Color>,
}

impl Trace {
    pub fn push(&mut self, point: u8, label: impl Into<String>, value: BigUint, expected: Color, observed: Color) -> bool {
        let step = TraceStep { point, label: label.into(), value, expected, observed };
        let holds = step.holds();
        self.steps.push(step);
        holds
    }

    /// Recompute every recorded color against `c`.
    pub fn replay(&self, c: &Coloring) -> Result<(), ReplayMismatch> {
        for (index, s) in self.steps.iter().enumerate() {
            match c.color_of(&s.value) {
                Ok(col) if col == s.observed => {}
                Ok(col) => return Err(ReplayMismatch { index, observed_now: Some(col) }),
                Err(_) => return Err(ReplayMismatch { index, observed_now: None }),
            }
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!(
                "trace: ({}) {} = {} expected={} observed={} {}\n",
                s.point,
                s.label,
                s.value,
                s.expected,
                s.observed,
                if s.holds() { "holds" } else { "fails" }
            ));
        }
        out
    }
}
