//! Quantitative modal logic: formulas, evaluation, Moss modalities and
//! distinguishing-formula synthesis.

mod eval;
mod formula;
mod synth;
mod text;

pub use eval::{eval, moss_eval, presentation_of, Evaluator, Presentation};
pub use formula::Formula;
pub use synth::{logical_distance, synthesize, LogicalDistance, Synthesizer};
pub use text::{parse, print};
