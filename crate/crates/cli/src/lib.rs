//! Command-line front end: run plans and their execution.

pub mod plan;
pub mod run;
