//! Functors, their elements, and finite coalgebras.

mod coalgebra;
mod element;
mod functor;

pub use coalgebra::{Coalgebra, DisjointUnion, Ingest};
pub use element::{
    apply_map, element_from_json, element_to_json, Diagnostic, FunctorElement, Severity,
};
pub use functor::{FunctorSpec, LabelSpace};
