//! Monochromatic solutions of polynomial configurations in 2-colorings.

pub mod bits;
pub mod builtin;
pub mod cnf;
pub mod hindman;
pub mod model;
pub mod search;
pub mod thick;

pub use model::*;
pub use search::{
    find_witness, forced, threshold, verify_witness, Budget, SearchCertificate, SearchConfig, SearchError,
    ThresholdReport, Verdict,
};
