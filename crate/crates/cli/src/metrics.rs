use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::ValueEnum;
use forge_core::textmetrics::{bleu, chrf_pp, rouge1, text_similarity, ChrfParams, DEFAULT_BLEU_ORDER};

use crate::io::read_text;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Metric {
    Chrfpp,
    Chrf,
    Bleu,
    Rouge1,
    Similarity,
}

#[derive(clap::Args)]
pub struct Args {
    #[arg(long, value_enum, default_value = "chrfpp")]
    metric: Metric,
    /// One reference per line.
    #[arg(long)]
    ref_file: PathBuf,
    /// One hypothesis per line, paired with the references by position.
    #[arg(long)]
    hyp_file: PathBuf,
}

/// Score each line pair; chrF and BLEU are sentence-level.
pub fn score_lines(metric: Metric, refs: &str, hyps: &str) -> Result<Vec<f64>> {
    let refs: Vec<&str> = refs.lines().collect();
    let hyps: Vec<&str> = hyps.lines().collect();
    if refs.len() != hyps.len() {
        bail!("{} reference lines but {} hypothesis lines", refs.len(), hyps.len());
    }
    Ok(refs
        .iter()
        .zip(&hyps)
        .map(|(r, h)| match metric {
            Metric::Chrfpp => chrf_pp(r, h, &ChrfParams::default()).value,
            Metric::Chrf => chrf_pp(r, h, &ChrfParams::chrf()).value,
            Metric::Bleu => bleu(r, h, DEFAULT_BLEU_ORDER).value,
            Metric::Rouge1 => rouge1(r, h).f1,
            Metric::Similarity => text_similarity(r, h),
        })
        .collect())
}

pub fn run(args: Args) -> Result<()> {
    let scores = score_lines(args.metric, &read_text(&args.ref_file)?, &read_text(&args.hyp_file)?)?;
    for s in scores {
        println!("{s}");
    }
    Ok(())
}
