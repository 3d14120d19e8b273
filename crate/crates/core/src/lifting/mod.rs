//! Fuzzy lax extensions: evaluation, predicate liftings, and the axiom checker.

pub mod axioms;
mod lift;
pub mod modality;
mod spec;
pub mod transport;

pub use axioms::{check_axioms, AxiomConfig, AxiomReport, Property, PropertyReport};
pub use lift::{kantorovich_grid_error_bound, Lifting};
pub use modality::{find_modality, modalities_for, PredicateLifting};
pub use spec::{HausdorffVariant, LiftingSpec, PairMode};
