//! Unreferenced story-quality evaluation.
//!
//! The crate builds perturbed negative samples from human-written stories,
//! trains a small contextual scorer on clean/perturbed pairs with a joint
//! classification and reconstruction objective, and measures how well metric
//! scores agree with human annotations.
//!
//! Model and statistics code is generic over the floating point type (see
//! [`Scalar`]); the aliases below fix the common instantiations.

pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod knowledge;
pub mod model;
pub mod num;
pub mod perturb;
pub mod pipeline;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
pub use num::Scalar;

/// Single-precision scorer, the type trained and checkpointed by the CLI.
pub type ScorerModelF32 = model::ScorerModel<f32>;
/// Double-precision scorer, used for gradient verification.
pub type ScorerModelF64 = model::ScorerModel<f64>;
/// Correlation report over double-precision scores.
pub type CorrelationReportF64 = eval::CorrelationReport<f64>;
