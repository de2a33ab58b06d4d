//! Invariants of finite metric graphs: weighted systole, volume entropy,
//! stable-norm unit ball measure, systolic volume, and the entropy of
//! subshifts of finite type, together with checkers that evaluate the known
//! inequalities between them and report slack and equality cases.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`, which is what the CLI and reports use.

pub mod analysis;
pub mod cycles;
pub mod entropy;
pub mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod report;
pub mod scalar;
pub mod spectral;
pub mod stable_norm;
pub mod subshift;
pub mod sysvol;

pub use error::{Error, Result};
pub use report::{InequalityReport, Provenance, Sense};
pub use scalar::Scalar;
pub use subshift::TransitionMatrix;

pub type Graph = graph::WeightedMultigraph<f64>;
pub type CycleWitness = cycles::CycleWitness<f64>;
pub type Chain = graph::Chain<f64>;
pub type CycleVector = stable_norm::CycleVector<f64>;
pub type StableBallVolume = stable_norm::StableBallVolume<f64>;
