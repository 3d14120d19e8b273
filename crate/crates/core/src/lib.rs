//! Behavioural distances on finite coalgebras via fuzzy lax extensions.

pub mod distance;
pub mod error;
pub mod fuzzy;
pub mod lifting;
pub mod logic;
pub mod random;
pub mod systems;

pub use error::{Error, Result};
pub use fuzzy::{Carrier, FuzzyRel, NonexpansivePair, RelationView, Scalar};
pub use lifting::{Lifting, LiftingSpec};
pub use logic::Formula;
pub use systems::{Coalgebra, FunctorElement, FunctorSpec, LabelSpace};
