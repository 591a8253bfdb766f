//! Local-global LDA for discovering geographical topics in location-tagged
//! short texts.
//!
//! Each token is generated either from its location's local topic
//! distribution or from a global one, mixed by a fixed local-global weight
//! ratio. The crate provides the collapsed Gibbs sampler, three comparison
//! baselines, evaluation metrics, and a synthetic corpus generator that acts
//! as a recovery oracle.
//!
//! Estimates, samplers and metrics are generic over the scalar type
//! ([`Real`], implemented for `f32` and `f64`); the aliases below fix it to
//! `f64`.

pub mod artifact;
pub mod baselines;
pub mod corpus;
mod error;
pub mod lglda;
pub mod metrics;
pub mod model;
pub mod sampling;
pub mod scalar;
pub mod synthgen;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ModelEstimate = lglda::ModelEstimate<f64>;
pub type BaselineEstimate = baselines::BaselineEstimate<f64>;
pub type Model = model::Model<f64>;
pub type ModelArtifact = artifact::ModelArtifact<f64>;
pub type MetricsReport = metrics::MetricsReport<f64>;

pub type ModelEstimate32 = lglda::ModelEstimate<f32>;
pub type BaselineEstimate32 = baselines::BaselineEstimate<f32>;
pub type Model32 = model::Model<f32>;
pub type ModelArtifact32 = artifact::ModelArtifact<f32>;
pub type MetricsReport32 = metrics::MetricsReport<f32>;
