//! Core of the benchmark toolkit: dataset records and manifests, translation
//! quality metrics, quality gating, statistics, evaluation and inference
//! techniques. Numeric code is generic over [`Scalar`] (`f32` or `f64`);
//! the `f64` aliases below cover the common case.

pub mod client;
pub mod eval;
pub mod mock;
pub mod model;
pub mod qe;
mod scalar;
pub mod stats;
pub mod techniques;
pub mod textmetrics;

pub use scalar::Scalar;

pub type Correlation = stats::CorrelationResult<f64>;
pub type L1Fit = stats::L1FitResult<f64>;
pub type ActivationDump32 = techniques::ActivationDump<f32>;
pub type ActivationDump64 = techniques::ActivationDump<f64>;
pub type SteeringVectors32 = techniques::SteeringVectors<f32>;
pub type SteeringVectors64 = techniques::SteeringVectors<f64>;
pub type SteeringConfig32 = techniques::SteeringConfig<f32>;
pub type SteeringConfig64 = techniques::SteeringConfig<f64>;
