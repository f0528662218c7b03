use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Subcommand, ValueEnum};
use forge_core::qe::derive_threshold;
use forge_core::stats::{l1_slope, parse_two_columns, pearson, spearman, two_proportion_test, validate_metric};
use serde_json::json;

use crate::io::{print_json, read_text};

#[derive(clap::Args)]
pub struct Args {
    #[command(subcommand)]
    command: StatsCommand,
}

#[derive(clap::Args)]
struct Input {
    /// Two numeric columns (whitespace, tab or comma separated); `-` for stdin.
    #[arg(default_value = "-")]
    file: PathBuf,
}

#[derive(Subcommand)]
enum StatsCommand {
    /// Spearman rank correlation of the two columns.
    Spearman(Input),
    /// Pearson correlation of the two columns.
    Pearson(Input),
    /// Least-absolute-deviation slope of column 2 on column 1.
    L1slope {
        #[command(flatten)]
        input: Input,
        /// Fit an intercept instead of passing through the origin.
        #[arg(long)]
        intercept: bool,
        /// Also derive a gate threshold: this reference-metric target divided by the slope.
        #[arg(long)]
        derive_target: Option<f64>,
    },
    /// Pooled two-proportion z-test; rows are `successes total` for groups a and b.
    Proptest(Input),
    /// Per-language Spearman table of candidate scores (column 1) against
    /// reference scores (column 2).
    Validate {
        /// `LANG=FILE`, repeatable; rows keep this order.
        #[arg(long = "scores", required = true, value_parser = parse_lang_file)]
        scores: Vec<(String, PathBuf)>,
        #[arg(long, value_enum, default_value = "markdown")]
        format: ReportFormat,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Markdown,
    Tsv,
    Json,
}

fn parse_lang_file(s: &str) -> Result<(String, PathBuf), String> {
    let (lang, file) = s.split_once('=').ok_or_else(|| format!("expected LANG=FILE, got {s:?}"))?;
    if lang.is_empty() || file.is_empty() {
        return Err(format!("expected LANG=FILE, got {s:?}"));
    }
    Ok((lang.to_string(), PathBuf::from(file)))
}

fn columns(input: &Input) -> Result<(Vec<f64>, Vec<f64>)> {
    parse_two_columns(&read_text(&input.file)?).with_context(|| input.file.display().to_string())
}

pub fn run(args: Args) -> Result<()> {
    match args.command {
        StatsCommand::Spearman(input) => {
            let (x, y) = columns(&input)?;
            print_json(&spearman(&x, &y)?)
        }
        StatsCommand::Pearson(input) => {
            let (x, y) = columns(&input)?;
            print_json(&pearson(&x, &y)?)
        }
        StatsCommand::L1slope { input, intercept, derive_target } => {
            let (x, y) = columns(&input)?;
            let fit = l1_slope(&x, &y, !intercept)?;
            let threshold = derive_target.map(|t| derive_threshold(t, fit.slope)).transpose()?;
            print_json(&json!({
                "slope": fit.slope,
                "intercept": fit.intercept,
                "objective": fit.objective,
                "threshold": threshold,
            }))
        }
        StatsCommand::Proptest(input) => {
            let (successes, totals) = columns(&input)?;
            if successes.len() != 2 {
                bail!("expected two rows (group a, group b), got {}", successes.len());
            }
            let count = |v: f64| -> Result<u64> {
                if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
                    Ok(v as u64)
                } else {
                    bail!("counts must be non-negative integers, got {v}")
                }
            };
            let (a, na, b, nb) = (count(successes[0])?, count(totals[0])?, count(successes[1])?, count(totals[1])?);
            let p = two_proportion_test(a, na, b, nb)?;
            print_json(&json!({
                "proportion_a": a as f64 / na as f64,
                "proportion_b": b as f64 / nb as f64,
                "p_value": p,
            }))
        }
        StatsCommand::Validate { scores, format } => {
            let mut inputs = Vec::with_capacity(scores.len());
            for (lang, file) in scores {
                let (x, y) = parse_two_columns(&read_text(&file)?).with_context(|| file.display().to_string())?;
                inputs.push((lang, x, y));
            }
            let report = validate_metric(&inputs)?;
            match format {
                ReportFormat::Markdown => print!("{}", report.to_markdown()),
                ReportFormat::Tsv => print!("{}", report.to_tsv()),
                ReportFormat::Json => print_json(&report)?,
            }
            Ok(())
        }
    }
}
