//! Domain types shared by every stage, and the line-delimited manifest format.

mod language;
mod manifest;
mod problem;

pub use language::{classify_resource, known_presence, LanguageTag, ResourceClass, KNOWN_PRESENCE};
pub use manifest::{
    check_split_containment, read_manifest, read_manifest_or_empty, write_manifest, DatasetManifest, ManifestError,
    ManifestLine, Split,
};
pub use problem::{AnswerKey, BBox, Category, ProblemRecord, TranslationRecord};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("web presence must be non-negative, got {0}")]
    NegativePresence(f64),
    #[error("invalid language code {0:?}: expected non-empty lowercase ASCII")]
    InvalidLanguageCode(String),
    #[error("invalid answer key {0:?}")]
    InvalidAnswerKey(String),
    #[error("invalid category {0:?}")]
    InvalidCategory(String),
    #[error("invalid field `{field}`: {reason}")]
    InvalidField { field: &'static str, reason: String },
}

impl ModelError {
    pub(crate) fn invalid_field(field: &'static str, reason: impl Into<String>) -> Self {
        ModelError::InvalidField { field, reason: reason.into() }
    }
}
