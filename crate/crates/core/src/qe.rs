//! Backtranslation quality estimation: score each backtranslation against the
//! source with chrF++, aggregate, and compare with the standard and
//! high-quality thresholds.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::model::TranslationRecord;
use crate::textmetrics::{chrf_pp, ChrfParams};
use crate::Scalar;

pub const DEFAULT_THRESHOLD: f64 = 0.625;
pub const DEFAULT_HIGH_QUALITY_THRESHOLD: f64 = 0.85;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QeError {
    #[error("backtranslation set for {0:?} is empty")]
    EmptyBacktranslationSet(String),
    #[error("duplicate backtranslator id {0:?}")]
    DuplicateBacktranslator(String),
    #[error("l1 slope must be positive, got {0}")]
    NonPositiveSlope(f64),
    #[error("invalid gate config: {0}")]
    InvalidConfig(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Backtranslation {
    pub backtranslator_id: String,
    pub text: String,
}

/// A translation together with its backtranslations into the source language.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BacktranslationSet {
    pub record: TranslationRecord,
    pub backtranslations: Vec<Backtranslation>,
}

impl BacktranslationSet {
    pub fn new(record: TranslationRecord) -> Self {
        Self { record, backtranslations: Vec::new() }
    }

    pub fn push(&mut self, backtranslator_id: impl Into<String>, text: impl Into<String>) -> Result<(), QeError> {
        let id = backtranslator_id.into();
        if self.backtranslations.iter().any(|b| b.backtranslator_id == id) {
            return Err(QeError::DuplicateBacktranslator(id));
        }
        self.backtranslations.push(Backtranslation { backtranslator_id: id, text: text.into() });
        Ok(())
    }

    fn check(&self) -> Result<(), QeError> {
        if self.backtranslations.is_empty() {
            return Err(QeError::EmptyBacktranslationSet(self.record.problem_id.clone()));
        }
        let mut seen = HashSet::new();
        for b in &self.backtranslations {
            if !seen.insert(b.backtranslator_id.as_str()) {
                return Err(QeError::DuplicateBacktranslator(b.backtranslator_id.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    #[default]
    Max,
    Mean,
    Min,
}

impl Aggregate {
    pub fn apply(self, scores: &[f64]) -> Option<f64> {
        if scores.is_empty() {
            return None;
        }
        Some(match self {
            Aggregate::Max => scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aggregate::Min => scores.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregate::Mean => scores.iter().sum::<f64>() / scores.len() as f64,
        })
    }
}

impl std::str::FromStr for Aggregate {
    type Err = QeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Ok(Aggregate::Max),
            "mean" => Ok(Aggregate::Mean),
            "min" => Ok(Aggregate::Min),
            other => Err(QeError::InvalidConfig(format!("unknown aggregate {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    threshold: f64,
    high_quality_threshold: f64,
    aggregate: Aggregate,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            high_quality_threshold: DEFAULT_HIGH_QUALITY_THRESHOLD,
            aggregate: Aggregate::Max,
        }
    }
}

impl GateConfig {
    pub fn new(threshold: f64, high_quality_threshold: f64, aggregate: Aggregate) -> Result<Self, QeError> {
        let unit = 0.0..=1.0;
        if !unit.contains(&threshold) || !unit.contains(&high_quality_threshold) {
            return Err(QeError::InvalidConfig("thresholds must lie in [0, 1]".into()));
        }
        if high_quality_threshold < threshold {
            return Err(QeError::InvalidConfig(format!(
                "high-quality threshold {high_quality_threshold} below standard threshold {threshold}"
            )));
        }
        Ok(Self { threshold, high_quality_threshold, aggregate })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn high_quality_threshold(&self) -> f64 {
        self.high_quality_threshold
    }

    pub fn aggregate(&self) -> Aggregate {
        self.aggregate
    }

    pub fn verdict(&self, m: f64) -> Verdict {
        if m >= self.high_quality_threshold {
            Verdict::PassHighQuality
        } else if m >= self.threshold {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Fail,
    Pass,
    PassHighQuality,
}

impl Verdict {
    /// Belongs in the standard split.
    pub fn is_standard(self) -> bool {
        self != Verdict::Fail
    }

    pub fn is_high_quality(self) -> bool {
        self == Verdict::PassHighQuality
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub problem_id: String,
    pub source_lang: String,
    pub target_lang: String,
    pub backtranslator_ids: Vec<String>,
    pub per_backtranslator_scores: Vec<f64>,
    pub aggregate: Aggregate,
    pub aggregate_m: f64,
    /// Number of backtranslators that contributed.
    pub num_backtranslators: usize,
    pub threshold: f64,
    pub high_quality_threshold: f64,
    pub verdict: Verdict,
}

/// chrF++ of each backtranslation (hypothesis) against the source text
/// (reference), in input order.
pub fn score_backtranslations(bt: &BacktranslationSet, params: &ChrfParams) -> Result<Vec<f64>, QeError> {
    bt.check()?;
    Ok(bt.backtranslations.iter().map(|b| chrf_pp(&bt.record.source_text, &b.text, params).value).collect())
}

pub fn gate(bt: &BacktranslationSet, cfg: &GateConfig, params: &ChrfParams) -> Result<QualityReport, QeError> {
    let scores = score_backtranslations(bt, params)?;
    Ok(report_from_scores(bt, scores, cfg))
}

/// Build a report from precomputed per-backtranslator scores.
pub fn report_from_scores(bt: &BacktranslationSet, scores: Vec<f64>, cfg: &GateConfig) -> QualityReport {
    let m = cfg.aggregate.apply(&scores).unwrap_or(0.0);
    QualityReport {
        problem_id: bt.record.problem_id.clone(),
        source_lang: bt.record.source_lang.to_string(),
        target_lang: bt.record.target_lang.to_string(),
        backtranslator_ids: bt.backtranslations.iter().map(|b| b.backtranslator_id.clone()).collect(),
        num_backtranslators: scores.len(),
        per_backtranslator_scores: scores,
        aggregate: cfg.aggregate,
        aggregate_m: m,
        threshold: cfg.threshold,
        high_quality_threshold: cfg.high_quality_threshold,
        verdict: cfg.verdict(m),
    }
}

/// Map a threshold on reference-based chrF++ to one on the backtranslation
/// metric, given the fitted slope between the two.
pub fn derive_threshold<T: Scalar>(reference_metric_target: T, l1_slope: T) -> Result<T, QeError> {
    if l1_slope.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return Err(QeError::NonPositiveSlope(l1_slope.as_f64()));
    }
    Ok(reference_metric_target / l1_slope)
}
