//! Monochromatic configurations from a multiplicatively thick color class,
//! following the thick-case analyses step by step, plus finite-scale
//! thickness and syndeticity detectors.

mod detect;
pub mod generators;
mod ladder;
mod tower;
mod trace;
mod witness;
mod xny;

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

pub use detect::{classify, is_syndetic, is_thick, Classification, ClassifyParams, Label, SyndeticEvidence, ThickEvidence};
pub use ladder::{build_ladder, Ladder, LadderError, LadderVariant};
pub use tower::{extract_tower, tower_entries, tower_template};
pub use trace::{ReplayMismatch, Trace, TraceStep};
pub use witness::{ScanWitness, ThicknessWitness, WitnessFailure, WitnessQuery, DEFAULT_CANDIDATE_BUDGET};
pub use xny::{extract_xy_xny, xny_template};

use crate::model::{Assignment, BoundTemplate, Color, Coloring, InstanceValues};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtractMode {
    Xny { n: u64 },
    Tower { n: u64 },
}

impl ExtractMode {
    pub fn n(self) -> u64 {
        match self {
            ExtractMode::Xny { n } | ExtractMode::Tower { n } => n,
        }
    }
}

/// Ladder length and variant used by each extraction.
pub fn ladder_shape(mode: ExtractMode) -> (usize, LadderVariant) {
    match mode {
        ExtractMode::Xny { .. } => (5, LadderVariant::Squares),
        ExtractMode::Tower { n } => (tower_entries(n), LadderVariant::Powers),
    }
}

impl fmt::Display for ExtractMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractMode::Xny { n } => write!(f, "xny n={n}"),
            ExtractMode::Tower { n } => write!(f, "tower n={n}"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error(transparent)]
    Witness(Box<LadderError>),
    #[error("scale exhaustion at point ({point}): {label} = {value} lies outside the domain")]
    ScaleExhaustion { point: u8, label: String, value: BigUint, trace: Trace },
    /// An assumption the analysis takes as already established fails on
    /// this coloring.
    #[error("unjustified step at point ({point}): {label} = {value} has the wrong color")]
    Unjustified { point: u8, label: String, value: BigUint, trace: Trace },
    #[error("parameter n = {0} is not supported here")]
    Parameter(u64),
    #[error("extracted configuration failed verification: {0}")]
    Verification(String),
}

impl From<LadderError> for ExtractError {
    fn from(e: LadderError) -> ExtractError {
        ExtractError::Witness(Box::new(e))
    }
}

/// A verified monochromatic configuration and how it was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionResult {
    pub mode: ExtractMode,
    /// Variable values, `(x, y)` or `(x_1, ..., x_n)`.
    pub assignment: Vec<BigUint>,
    pub values: InstanceValues,
    pub color: Color,
    /// Point of the analysis that produced the configuration.
    pub exit_point: u8,
    pub exit: String,
    pub trace: Trace,
    pub ladder: Ladder,
    pub notes: Vec<String>,
}

impl ExtractionResult {
    /// Recheck monochromaticity and shape against `c`.
    pub fn verify(&self, c: &Coloring) -> Result<(), String> {
        let template = match self.mode {
            ExtractMode::Xny { n } => xny_template(n),
            ExtractMode::Tower { n } => tower_template(n),
        };
        check_configuration(c, &template, &self.assignment, self.color).and_then(|values| {
            if values == self.values {
                Ok(())
            } else {
                Err("reported values differ from the instantiated template".into())
            }
        })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("mode: {}\n", self.mode));
        let names: Vec<String> = match self.mode {
            ExtractMode::Xny { .. } => vec!["x".into(), "y".into()],
            ExtractMode::Tower { n } => (1..=n).map(|i| format!("x{i}")).collect(),
        };
        let assignment: Vec<String> = names.iter().zip(&self.assignment).map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("assignment: {}\n", assignment.join(" ")));
        out.push_str(&format!("configuration: {}\n", self.values));
        out.push_str(&format!("color: {}\n", self.color));
        out.push_str(&format!("exit: ({}) {}\n", self.exit_point, self.exit));
        for note in &self.notes {
            out.push_str(&format!("note: {note}\n"));
        }
        out.push_str(&self.trace.render());
        out.push_str(&self.ladder.render());
        out
    }
}

/// Run the extraction selected by `mode`.
pub fn extract(c: &Coloring, witness: &dyn ThicknessWitness, mode: ExtractMode, floor: &BigUint) -> Result<ExtractionResult, ExtractError> {
    match mode {
        ExtractMode::Xny { n } => extract_xy_xny(c, witness, n, floor),
        ExtractMode::Tower { n } => extract_tower(c, witness, n, floor),
    }
}

/// Instantiate `template` at `assignment` and require one color throughout.
pub(crate) fn check_configuration(
    c: &Coloring,
    template: &BoundTemplate,
    assignment: &[BigUint],
    color: Color,
) -> Result<InstanceValues, String> {
    let values = template.instantiate(&Assignment::new(assignment.to_vec())).map_err(|e| e.to_string())?;
    match c.monochromatic_color(&values) {
        Ok(Some(col)) if col == color => Ok(values),
        Ok(Some(col)) => Err(format!("configuration has color {col}, expected {color}")),
        Ok(None) => Err("configuration is not monochromatic".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Coloring lookups that record each tested assumption.
pub(crate) struct Walk<'a> {
    pub c: &'a Coloring,
    pub class: Color,
    pub trace: Trace,
}

impl Walk<'_> {
    pub fn a(&self) -> Color {
        self.class
    }

    pub fn b(&self) -> Color {
        1 - self.class
    }

    /// Record whether `value` has color `expected`.
    pub fn expect(&mut self, point: u8, label: impl Into<String>, value: &BigUint, expected: Color) -> Result<bool, ExtractError> {
        let label = label.into();
        match self.c.color_of(value) {
            Ok(observed) => Ok(self.trace.push(point, label, value.clone(), expected, observed)),
            Err(_) => Err(ExtractError::ScaleExhaustion {
                point,
                label,
                value: value.clone(),
                trace: std::mem::take(&mut self.trace),
            }),
        }
    }
}
