//! Evaluation harness: prompts, model querying, answer parsing, accuracy
//! aggregation and human comparison statistics.

mod aggregate;
mod answer;
mod harness;
pub mod human;
mod prompts;

pub use aggregate::{aggregate, AccuracyReport, AggregateError, LanguageAccuracy, PresenceTable};
pub use answer::{near_misses, parse_answer, ParsedAnswer};
pub use harness::{evaluate, user_text, EvalError, EvalOptions, EvalResult};
pub use human::{difficulty_indices, human_score, percentile_rank, HumanRecord, Outcome};
pub use prompts::{
    PromptCatalog, PromptError, CLASSIFICATION_PROMPT, CORRUPTION_PROMPT, FIGURE_DETECTION_PROMPT, MTR_TEMPLATE,
};
