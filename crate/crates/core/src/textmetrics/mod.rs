//! Reference-based string similarity metrics.
//!
//! All scores are in `[0, 1]`. When both reference and hypothesis are empty
//! every metric returns `1.0`.

mod bleu;
mod chrf;
mod ngram;
mod rouge;
mod similarity;

pub use bleu::{bleu, DEFAULT_BLEU_ORDER};
pub use chrf::{chrf_pp, ChrfParams, ChrfStatistics};
pub use ngram::{chrf_word_tokens, normalize_text, whitespace_tokens};
pub use rouge::{rouge1, Rouge1};
pub use similarity::{text_similarity, TrigramProfile};

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricScore {
    pub value: f64,
    pub metric_name: String,
    pub hypothesis_len: usize,
    pub reference_len: usize,
}

impl MetricScore {
    pub(crate) fn new(metric_name: &str, value: f64, hypothesis_len: usize, reference_len: usize) -> Self {
        debug_assert!((0.0..=1.0).contains(&value), "{metric_name} out of range: {value}");
        Self { value: value.clamp(0.0, 1.0), metric_name: metric_name.to_string(), hypothesis_len, reference_len }
    }
}
