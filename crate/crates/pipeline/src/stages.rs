//! Per-sample translation and backtranslation-gating stages. A failing sample
//! is reported and skipped; it never aborts the batch.

use forge_core::client::ClientError;
use forge_core::model::{LanguageTag, ProblemRecord, TranslationRecord};
use forge_core::qe::{gate, BacktranslationSet, GateConfig, QualityReport};
use forge_core::textmetrics::ChrfParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clients::{length_suspicious, TranslateRequest, TranslationClient};
use crate::PipelineError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub problem_id: String,
    pub stage: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    pub error: String,
}

/// A problem's translated question and options. The text unit seen by the
/// quality gate is the question followed by the five options, one per line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslatedProblem {
    pub record: TranslationRecord,
    pub question: String,
    pub options: [String; 5],
    /// Segments whose length ratio looked suspicious (0 = question, 1..=5 = options).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub length_warnings: Vec<usize>,
}

impl TranslatedProblem {
    /// The source problem with question and options replaced.
    pub fn apply_to(&self, problem: &ProblemRecord) -> ProblemRecord {
        let mut out = problem.clone();
        out.question_text = self.question.clone();
        out.options = self.options.clone();
        out
    }
}

fn segments(problem: &ProblemRecord) -> Vec<&str> {
    std::iter::once(problem.question_text.as_str()).chain(problem.options.iter().map(String::as_str)).collect()
}

pub fn joined_text(problem: &ProblemRecord) -> String {
    segments(problem).join("\n")
}

/// Translate each non-empty segment separately; empty options (pictures)
/// stay empty.
fn translate_segments(
    problem_id: &str,
    parts: &[&str],
    source: &LanguageTag,
    target: &LanguageTag,
    client: &dyn TranslationClient,
) -> Result<(Vec<String>, Vec<usize>), ClientError> {
    let mut out = Vec::with_capacity(parts.len());
    let mut warnings = Vec::new();
    for (i, text) in parts.iter().enumerate() {
        if text.trim().is_empty() {
            out.push(String::new());
            continue;
        }
        let translated = client.translate(&TranslateRequest { problem_id, text, source, target })?;
        if length_suspicious(text, &translated) {
            tracing::warn!(problem_id, segment = i, "suspicious translation length");
            warnings.push(i);
        }
        out.push(translated);
    }
    Ok((out, warnings))
}

pub fn translate_problem(
    problem: &ProblemRecord,
    source: &LanguageTag,
    target: &LanguageTag,
    client: &dyn TranslationClient,
) -> Result<TranslatedProblem, PipelineError> {
    let parts = segments(problem);
    let (out, length_warnings) = translate_segments(&problem.id, &parts, source, target, client)?;
    let record = TranslationRecord::new(
        problem.id.clone(),
        source.clone(),
        target.clone(),
        parts.join("\n"),
        out.join("\n"),
        client.id(),
    )?;
    let mut it = out.into_iter();
    let question = it.next().expect("question segment");
    let options: [String; 5] = std::array::from_fn(|_| it.next().expect("option segment"));
    Ok(TranslatedProblem { record, question, options, length_warnings })
}

pub(crate) fn pool(concurrency: usize) -> Result<rayon::ThreadPool, PipelineError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(concurrency.max(1))
        .build()
        .map_err(|e| PipelineError::Config(format!("worker pool: {e}")))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TranslateOutput {
    /// In input order, failures omitted.
    pub translations: Vec<TranslatedProblem>,
    pub failures: Vec<StageFailure>,
}

pub fn translate_stage(
    problems: &[ProblemRecord],
    source: &LanguageTag,
    target: &LanguageTag,
    client: &dyn TranslationClient,
    concurrency: usize,
) -> Result<TranslateOutput, PipelineError> {
    let results: Vec<_> = pool(concurrency)?
        .install(|| problems.par_iter().map(|p| (p, translate_problem(p, source, target, client))).collect());
    let mut out = TranslateOutput::default();
    for (p, r) in results {
        match r {
            Ok(t) => out.translations.push(t),
            Err(e) => out.failures.push(StageFailure {
                problem_id: p.id.clone(),
                stage: "translate".into(),
                language: Some(target.to_string()),
                error: e.to_string(),
            }),
        }
    }
    Ok(out)
}

/// Backtranslate a translation into its source language, one line of the
/// target text at a time.
pub fn backtranslate(record: &TranslationRecord, client: &dyn TranslationClient) -> Result<String, ClientError> {
    let parts: Vec<&str> = record.target_text.split('\n').collect();
    let (out, _) = translate_segments(&record.problem_id, &parts, &record.target_lang, &record.source_lang, client)?;
    Ok(out.join("\n"))
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct QeOutput {
    /// One report per translation that got at least one backtranslation, in
    /// input order.
    pub reports: Vec<QualityReport>,
    pub failures: Vec<StageFailure>,
}

/// Backtranslate with every client and gate on the aggregated chrF++. A
/// failing backtranslator is dropped from that sample's set; a sample with
/// no backtranslation left is a failure.
pub fn qe_stage(
    translations: &[TranslatedProblem],
    backtranslators: &[&dyn TranslationClient],
    cfg: &GateConfig,
    params: &ChrfParams,
    concurrency: usize,
) -> Result<QeOutput, PipelineError> {
    if backtranslators.is_empty() {
        return Err(PipelineError::Config("at least one backtranslator is required".into()));
    }
    let per_sample: Vec<(Option<QualityReport>, Vec<StageFailure>)> = pool(concurrency)?.install(|| {
        translations
            .par_iter()
            .map(|t| {
                let language = Some(t.record.target_lang.to_string());
                let fail = |error: String| StageFailure {
                    problem_id: t.record.problem_id.clone(),
                    stage: "qe".into(),
                    language: language.clone(),
                    error,
                };
                let mut set = BacktranslationSet::new(t.record.clone());
                let mut failures = Vec::new();
                for client in backtranslators {
                    match backtranslate(&t.record, *client)
                        .map_err(|e| e.to_string())
                        .and_then(|text| set.push(client.id(), text).map_err(|e| e.to_string()))
                    {
                        Ok(()) => {}
                        Err(e) => failures.push(fail(format!("backtranslator {}: {e}", client.id()))),
                    }
                }
                match gate(&set, cfg, params) {
                    Ok(report) => (Some(report), failures),
                    Err(e) => {
                        failures.push(fail(e.to_string()));
                        (None, failures)
                    }
                }
            })
            .collect()
    });
    let mut out = QeOutput::default();
    for (report, failures) in per_sample {
        out.reports.extend(report);
        out.failures.extend(failures);
    }
    Ok(out)
}
