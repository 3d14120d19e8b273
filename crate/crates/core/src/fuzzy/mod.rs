//! Exact arithmetic on `[0,1]` and the algebra of fuzzy relations.

mod relation;
mod scalar;

pub use relation::{companion_of, Carrier, FuzzyRel, NonexpansivePair, RelationView};
pub use scalar::{format_rational, parse_rational, Scalar};
