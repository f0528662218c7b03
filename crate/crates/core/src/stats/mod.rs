//! Statistical primitives: rank and product-moment correlation with p-values,
//! robust L1 slope fits, a pooled two-proportion test, run-level accuracy
//! summaries and a per-language metric validation report. Generic over
//! [`Scalar`](crate::Scalar).

mod accuracy;
mod correlation;
mod l1;
mod proportion;
mod rank;
mod validation;

pub use accuracy::accuracy_with_stderr;
pub use correlation::{pearson, spearman, CorrelationKind, CorrelationResult};
pub use l1::{l1_objective, l1_slope, L1FitResult};
pub use proportion::{normal_two_sided_p, two_proportion_test};
pub use rank::fractional_ranks;
pub use validation::{parse_two_columns, validate_metric, ValidationReport, ValidationRow};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("input is constant, correlation undefined")]
    ConstantInput,
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}
