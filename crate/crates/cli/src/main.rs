mod compose;
mod eval;
mod io;
mod metrics;
mod pipeline;
mod qe;
mod review;
mod stats;
mod steer;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tracing_subscriber::EnvFilter;

#[derive(Parser)]
#[command(name = "forge", version, about = "Multilingual multimodal benchmark toolkit")]
struct Cli {
    /// Log filter, e.g. `info` or `forge_pipeline=debug`. Overrides RUST_LOG.
    #[arg(long, global = true)]
    log: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score hypothesis lines against reference lines.
    Metrics(metrics::Args),
    /// Gate translations on their backtranslations.
    Qe(qe::Args),
    /// Correlations, L1 slope, proportion test and metric validation.
    Stats(stats::Args),
    /// Render translated question text into problem images.
    Compose(compose::Args),
    /// Run the dataset pipeline from a config file.
    Run(pipeline::RunArgs),
    /// Remove near-duplicate problems from a manifest.
    Dedup(pipeline::DedupArgs),
    /// Translate a manifest, or backtranslate translations.
    Translate(pipeline::TranslateArgs),
    /// Query a model on one or more manifests.
    Eval(eval::EvalArgs),
    /// Accuracy and human-comparison report from evaluation results.
    Report(eval::ReportArgs),
    /// Compute or apply activation steering vectors.
    Steer(steer::Args),
    /// Serve the human review API.
    ReviewServe(review::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let filter = match &cli.log {
        Some(f) => EnvFilter::new(f),
        None => EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("warn")),
    };
    tracing_subscriber::fmt().with_env_filter(filter).with_writer(std::io::stderr).init();

    let result = match cli.command {
        Command::Metrics(a) => metrics::run(a),
        Command::Qe(a) => qe::run(a),
        Command::Stats(a) => stats::run(a),
        Command::Compose(a) => compose::run(a),
        Command::Run(a) => pipeline::run(a),
        Command::Dedup(a) => pipeline::dedup(a),
        Command::Translate(a) => pipeline::translate(a),
        Command::Eval(a) => eval::eval(a),
        Command::Report(a) => eval::report(a),
        Command::Steer(a) => steer::run(a),
        Command::ReviewServe(a) => review::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::FAILURE
        }
    }
}

/// The error chain on one line, skipping causes already quoted by their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}
