//! Multilingual inference techniques: translated-question prompting, voting
//! across pivot languages, and activation steering.

mod clsp;
mod mtr;
pub mod steering;

pub use clsp::{clsp_vote, DEFAULT_PIVOTS};
pub use mtr::{mtr_prompt, MtrError, MtrTemplate};
pub use steering::{
    apply_steering, compute_steering_vectors, half_inverse_scale, ActivationDump, SteeringConfig, SteeringError,
    SteeringVectors, TokenClass,
};
