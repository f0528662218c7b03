use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::client::{ChatRequest, ModelClient};
use crate::model::{DatasetManifest, ProblemRecord};

use super::answer::{near_misses, parse_answer, ParsedAnswer};
use super::prompts::{PromptCatalog, PromptError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub problem_id: String,
    pub language: String,
    pub run_index: usize,
    pub raw_response: String,
    pub parsed: ParsedAnswer,
    pub correct: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("runs must be >= 1")]
    NoRuns,
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error("failed to build worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub runs: usize,
    /// Upper bound on requests in flight.
    pub concurrency: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { runs: 3, concurrency: 8 }
    }
}

/// User message text: the question followed by the labelled options.
pub fn user_text(problem: &ProblemRecord) -> String {
    let mut text = problem.question_text.clone();
    for (key, option) in crate::model::AnswerKey::ALL.iter().zip(&problem.options) {
        text.push_str(&format!("\n{key}) {option}"));
    }
    text
}

/// Query the model `runs` times on every manifest entry. Transport failures
/// become `N` answers carrying an error note; results are ordered by run,
/// then manifest order.
pub fn evaluate<C: ModelClient>(
    manifest: &DatasetManifest,
    client: &C,
    prompts: &PromptCatalog,
    opts: EvalOptions,
) -> Result<Vec<EvalResult>, EvalError> {
    if opts.runs == 0 {
        return Err(EvalError::NoRuns);
    }
    let system = prompts.system_prompt(&manifest.language)?;
    let jobs: Vec<(usize, &ProblemRecord)> =
        (0..opts.runs).flat_map(|run| manifest.entries.iter().map(move |p| (run, p))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.concurrency.max(1))
        .build()
        .map_err(|e| EvalError::Pool(e.to_string()))?;
    let language = manifest.language.to_string();
    let results = pool.install(|| {
        jobs.par_iter()
            .map(|&(run, problem)| {
                let req = ChatRequest {
                    system,
                    text: user_text(problem),
                    image_ref: &problem.image_ref,
                    run_index: run,
                    problem_id: &problem.id,
                };
                match client.chat(&req) {
                    Ok(raw) => {
                        let parsed = parse_answer(&raw);
                        if parsed.is_none() {
                            for (pos, form) in near_misses(&raw) {
                                tracing::debug!(problem = %problem.id, run, pos, form, "unparsed answer-like string");
                            }
                        }
                        EvalResult {
                            problem_id: problem.id.clone(),
                            language: language.clone(),
                            run_index: run,
                            correct: parsed.key() == Some(problem.answer_key),
                            raw_response: raw,
                            parsed,
                            error: None,
                        }
                    }
                    Err(e) => {
                        tracing::warn!(problem = %problem.id, run, error = %e, "model query failed");
                        EvalResult {
                            problem_id: problem.id.clone(),
                            language: language.clone(),
                            run_index: run,
                            raw_response: String::new(),
                            parsed: ParsedAnswer::N,
                            correct: false,
                            error: Some(e.to_string()),
                        }
                    }
                }
            })
            .collect()
    });
    Ok(results)
}
