//! Dataset construction: cleaning, blocklist and dedup over the source pool,
//! a corruption check with human fixes, translation gated by backtranslation
//! quality, text re-composition into images, and per-language manifests.

pub mod blocklist;
pub mod clean;
pub mod clients;
pub mod config;
pub mod corruption;
pub mod dedup;
pub mod http;
pub mod review;
pub mod run;
pub mod stages;

use std::path::PathBuf;

use forge_compose::ComposeError;
use forge_core::client::ClientError;
use forge_core::model::{ManifestError, ModelError};
use forge_core::qe::QeError;

pub use config::{ClientSpec, PipelineConfig, Stage};
pub use run::{run_pipeline, run_pipeline_with, Clients, RunSummary};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("i/o on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("judge failed on {problem_id}: {source}")]
    Judge { problem_id: String, source: ClientError },
    #[error(transparent)]
    Review(#[from] review::ReviewError),
    #[error(transparent)]
    Compose(#[from] ComposeError),
    #[error(transparent)]
    Qe(#[from] QeError),
}

impl PipelineError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PipelineError::Io { path: path.into(), source }
    }
}
