use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{classify_resource, known_presence, LanguageTag, ResourceClass};
use crate::stats::{accuracy_with_stderr, spearman, CorrelationResult, StatsError};

use super::harness::EvalResult;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AggregateError {
    #[error("no results for language {0}")]
    MissingLanguage(String),
    #[error("language {language}: {source}")]
    Stats { language: String, source: StatsError },
}

/// Web-presence shares used to place languages into resource clusters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PresenceTable {
    pub percent: BTreeMap<String, f64>,
}

impl PresenceTable {
    /// Shares of the sixteen evaluation languages.
    pub fn known() -> Self {
        let percent = crate::model::KNOWN_PRESENCE.iter().map(|(c, _, p)| (c.to_string(), *p)).collect();
        Self { percent }
    }

    pub fn presence(&self, lang: &LanguageTag) -> Option<f64> {
        self.percent.get(lang.code()).copied().or_else(|| known_presence(lang.code()))
    }

    pub fn cluster(&self, lang: &LanguageTag) -> Option<ResourceClass> {
        self.presence(lang).and_then(|p| classify_resource(p).ok()).or(lang.resource_class())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LanguageAccuracy {
    pub language: String,
    pub accuracy: f64,
    /// Standard error across runs.
    pub stderr: f64,
    pub runs: usize,
    pub problems: usize,
    pub presence_percent: Option<f64>,
    pub cluster: Option<ResourceClass>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub languages: Vec<LanguageAccuracy>,
    /// Mean of member-language accuracies per cluster (English included in High).
    pub clusters: BTreeMap<ResourceClass, f64>,
    pub english: Option<f64>,
    /// Spearman correlation of language accuracy with web presence; `None`
    /// with fewer than two languages of known presence or constant inputs.
    pub presence_spearman: Option<CorrelationResult<f64>>,
}

/// Per-language accuracy with run-level standard error, cluster means, the
/// English column and the accuracy-versus-presence rank correlation.
pub fn aggregate(
    results: &[EvalResult],
    languages: &[LanguageTag],
    presence: &PresenceTable,
) -> Result<AccuracyReport, AggregateError> {
    let mut rows = Vec::with_capacity(languages.len());
    for lang in languages {
        let mine: Vec<&EvalResult> = results.iter().filter(|r| r.language == lang.code()).collect();
        if mine.is_empty() {
            return Err(AggregateError::MissingLanguage(lang.to_string()));
        }
        let mut per_run: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
        for r in &mine {
            let slot = per_run.entry(r.run_index).or_default();
            slot.0 += r.correct as u64;
            slot.1 += 1;
        }
        let problems: BTreeSet<&str> = mine.iter().map(|r| r.problem_id.as_str()).collect();
        let n = problems.len() as u64;
        let correct: Vec<u64> = per_run.values().map(|&(c, _)| c).collect();
        let (accuracy, stderr) = accuracy_with_stderr::<f64>(&correct, n)
            .map_err(|source| AggregateError::Stats { language: lang.to_string(), source })?;
        rows.push(LanguageAccuracy {
            language: lang.to_string(),
            accuracy,
            stderr,
            runs: per_run.len(),
            problems: problems.len(),
            presence_percent: presence.presence(lang),
            cluster: presence.cluster(lang),
        });
    }

    let mut clusters = BTreeMap::new();
    for class in ResourceClass::ALL {
        let members: Vec<f64> = rows.iter().filter(|r| r.cluster == Some(class)).map(|r| r.accuracy).collect();
        if !members.is_empty() {
            clusters.insert(class, members.iter().sum::<f64>() / members.len() as f64);
        }
    }
    let english = rows.iter().find(|r| r.language == "eng").map(|r| r.accuracy);

    let (acc, pres): (Vec<f64>, Vec<f64>) =
        rows.iter().filter_map(|r| r.presence_percent.map(|p| (r.accuracy, p))).unzip();
    let presence_spearman = if acc.len() >= 2 { spearman(&acc, &pres).ok() } else { None };

    Ok(AccuracyReport { languages: rows, clusters, english, presence_spearman })
}
