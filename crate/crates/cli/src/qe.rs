use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use forge_core::model::TranslationRecord;
use forge_core::qe::{gate, Aggregate, BacktranslationSet, GateConfig, QualityReport};
use forge_core::textmetrics::ChrfParams;
use serde::{Deserialize, Serialize};

use crate::io::{read_jsonl, write_jsonl};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AggregateArg {
    Max,
    Mean,
    Min,
}

impl From<AggregateArg> for Aggregate {
    fn from(a: AggregateArg) -> Self {
        match a {
            AggregateArg::Max => Aggregate::Max,
            AggregateArg::Mean => Aggregate::Mean,
            AggregateArg::Min => Aggregate::Min,
        }
    }
}

/// One line of a backtranslation file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BacktranslationLine {
    pub problem_id: String,
    /// Language of the translation that was backtranslated; needed when one
    /// file covers several.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_lang: Option<String>,
    pub backtranslator_id: String,
    pub text: String,
}

#[derive(clap::Args)]
pub struct Args {
    /// Translation records, one JSON object per line.
    #[arg(long = "in")]
    input: PathBuf,
    /// Backtranslations, one JSON object per line.
    #[arg(long)]
    backtrans: PathBuf,
    #[arg(long, default_value_t = 0.625)]
    threshold: f64,
    #[arg(long, default_value_t = 0.85)]
    hq_threshold: f64,
    #[arg(long, value_enum, default_value = "max")]
    aggregate: AggregateArg,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Gate every translation that has at least one backtranslation. Returns the
/// reports in input order and the ids left without backtranslations.
pub fn gate_files(
    translations: &[TranslationRecord],
    backtranslations: &[BacktranslationLine],
    cfg: &GateConfig,
) -> Result<(Vec<QualityReport>, Vec<String>)> {
    let mut by_key: BTreeMap<(&str, Option<&str>), Vec<&BacktranslationLine>> = BTreeMap::new();
    for b in backtranslations {
        by_key.entry((b.problem_id.as_str(), b.target_lang.as_deref())).or_default().push(b);
    }
    let (mut reports, mut missing) = (Vec::new(), Vec::new());
    for t in translations {
        let lines: Vec<&&BacktranslationLine> = [Some(t.target_lang.code()), None]
            .into_iter()
            .flat_map(|lang| by_key.get(&(t.problem_id.as_str(), lang)).into_iter().flatten())
            .collect();
        if lines.is_empty() {
            missing.push(t.problem_id.clone());
            continue;
        }
        let mut set = BacktranslationSet::new(t.clone());
        for b in lines {
            set.push(b.backtranslator_id.clone(), b.text.clone())
                .with_context(|| format!("problem {}", t.problem_id))?;
        }
        reports.push(gate(&set, cfg, &ChrfParams::default())?);
    }
    Ok((reports, missing))
}

pub fn run(args: Args) -> Result<()> {
    let cfg = GateConfig::new(args.threshold, args.hq_threshold, args.aggregate.into())?;
    let translations: Vec<TranslationRecord> = read_jsonl(&args.input)?;
    for t in &translations {
        t.validate().with_context(|| format!("problem {}", t.problem_id))?;
    }
    let backtranslations: Vec<BacktranslationLine> = read_jsonl(&args.backtrans)?;
    let (reports, missing) = gate_files(&translations, &backtranslations, &cfg)?;
    if !missing.is_empty() {
        tracing::warn!(count = missing.len(), first = %missing[0], "translations without backtranslations skipped");
    }
    write_jsonl(args.out.as_deref(), &reports)?;
    let standard = reports.iter().filter(|r| r.verdict.is_standard()).count();
    let hq = reports.iter().filter(|r| r.verdict.is_high_quality()).count();
    eprintln!("{} gated: {standard} standard, {hq} high quality, {} skipped", reports.len(), missing.len());
    Ok(())
}
