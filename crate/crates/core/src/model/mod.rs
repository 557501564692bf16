//! Templates, bound instances and colorings.

pub mod coloring;
pub mod instance;
pub mod template;

pub use coloring::{Color, Coloring, ColoringError, Containment, Rule, RuleSpec};
pub use instance::{Assignment, BoundForm, BoundTemplate, InstanceValues, ModelError, Params};
pub use template::{Distinctness, ParseError, ParseErrorKind, Template};
