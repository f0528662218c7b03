use std::collections::BTreeSet;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use forge_core::model::{read_manifest, write_manifest, DatasetManifest, LanguageTag, TranslationRecord};
use forge_pipeline::clients::{EchoTranslator, TranslationClient};
use forge_pipeline::dedup::{dedup as dedup_pool, DEFAULT_DEDUP_THRESHOLD};
use forge_pipeline::http::{HttpTranslationClient, RetryPolicy};
use forge_pipeline::stages::{backtranslate, translate_stage};
use forge_pipeline::{run_pipeline, PipelineConfig};
use rayon::prelude::*;

use crate::io::{print_json, read_jsonl, write_jsonl};
use crate::qe::BacktranslationLine;

#[derive(clap::Args)]
pub struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Reuse translations and quality reports from an earlier run.
    #[arg(long)]
    resume: bool,
}

pub fn run(args: RunArgs) -> Result<()> {
    let cfg = PipelineConfig::load(&args.config)?;
    let summary = run_pipeline(&cfg, args.resume)?;
    print_json(&summary)
}

#[derive(clap::Args)]
pub struct DedupArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_DEDUP_THRESHOLD)]
    threshold: f64,
    /// Write the dropped records and their surviving partner here.
    #[arg(long)]
    dropped: Option<PathBuf>,
}

pub fn dedup(args: DedupArgs) -> Result<()> {
    if !(args.threshold > 0.0 && args.threshold <= 1.0) {
        bail!("threshold must lie in (0, 1], got {}", args.threshold);
    }
    let manifest = read_manifest(&args.input)?;
    let outcome = dedup_pool(manifest.entries, args.threshold);
    let kept = DatasetManifest { entries: outcome.kept, ..DatasetManifest::new(manifest.language, manifest.split) };
    write_manifest(&kept, &args.out)?;
    if let Some(path) = &args.dropped {
        write_jsonl(Some(path), &outcome.dropped)?;
    }
    eprintln!("{} kept, {} dropped", kept.entries.len(), outcome.dropped.len());
    Ok(())
}

#[derive(clap::Args)]
pub struct TranslateArgs {
    /// Problem manifest to translate.
    #[arg(long, conflicts_with = "backtranslate", required_unless_present = "backtranslate")]
    manifest: Option<PathBuf>,
    /// Translation records to backtranslate into their source language.
    #[arg(long)]
    backtranslate: Option<PathBuf>,
    /// Target language code (manifest mode).
    #[arg(long, required_unless_present = "backtranslate")]
    tgt: Option<String>,
    /// Translation service base URL; `echo` returns the input unchanged.
    #[arg(long)]
    endpoint: String,
    /// Model identity recorded in the output.
    #[arg(long, default_value = "translator")]
    id: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 8)]
    concurrency: usize,
    #[arg(long, default_value_t = 3)]
    retries: u32,
    /// Keep lines already in `--out` and only process missing ids.
    #[arg(long)]
    resume: bool,
}

fn client(args: &TranslateArgs) -> Result<Box<dyn TranslationClient>> {
    Ok(if args.endpoint == "echo" {
        Box::new(EchoTranslator::new(args.id.clone()))
    } else {
        let retry = RetryPolicy { retries: args.retries, ..RetryPolicy::default() };
        Box::new(HttpTranslationClient::new(args.id.clone(), &args.endpoint, retry)?)
    })
}

/// Ids already present in an output file when resuming.
fn done_ids<F: Fn(&serde_json::Value) -> Option<String>>(out: &Path, resume: bool, key: F) -> Result<BTreeSet<String>> {
    if !resume || !out.exists() {
        return Ok(BTreeSet::new());
    }
    let lines: Vec<serde_json::Value> = read_jsonl(out)?;
    Ok(lines.iter().filter_map(key).collect())
}

fn append_jsonl<T: serde::Serialize>(path: &Path, items: &[T], append: bool) -> Result<()> {
    let mut file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(append)
        .truncate(!append)
        .open(path)
        .with_context(|| format!("opening {}", path.display()))?;
    for item in items {
        writeln!(file, "{}", serde_json::to_string(item)?)?;
    }
    Ok(())
}

pub fn translate(args: TranslateArgs) -> Result<()> {
    let client = client(&args)?;
    if let Some(path) = &args.backtranslate {
        let records: Vec<TranslationRecord> = read_jsonl(path)?;
        let done = done_ids(&args.out, args.resume, |v| {
            let id = v.get("problem_id")?.as_str()?;
            let lang = v.get("target_lang").and_then(|l| l.as_str()).unwrap_or("");
            Some(format!("{id}\u{0}{lang}"))
        })?;
        let todo: Vec<&TranslationRecord> =
            records.iter().filter(|r| !done.contains(&format!("{}\u{0}{}", r.problem_id, r.target_lang))).collect();
        let workers = rayon::ThreadPoolBuilder::new().num_threads(args.concurrency.max(1)).build()?;
        let results: Vec<_> = workers.install(|| todo.par_iter().map(|r| backtranslate(r, client.as_ref())).collect());
        let mut lines = Vec::new();
        let mut failed = 0;
        for (r, res) in todo.iter().zip(results) {
            match res {
                Ok(text) => lines.push(BacktranslationLine {
                    problem_id: r.problem_id.clone(),
                    target_lang: Some(r.target_lang.to_string()),
                    backtranslator_id: client.id().to_string(),
                    text,
                }),
                Err(e) => {
                    failed += 1;
                    tracing::warn!(problem_id = %r.problem_id, error = %e, "backtranslation failed");
                }
            }
        }
        append_jsonl(&args.out, &lines, args.resume)?;
        eprintln!("{} backtranslated, {failed} failed, {} already done", lines.len(), done.len());
        return Ok(());
    }

    let manifest = read_manifest(args.manifest.as_deref().expect("clap enforces manifest or backtranslate"))?;
    let target = LanguageTag::new(args.tgt.clone().expect("clap enforces tgt"))?;
    let done = done_ids(&args.out, args.resume, |v| Some(v.get("problem_id")?.as_str()?.to_string()))?;
    let todo: Vec<_> = manifest.entries.iter().filter(|p| !done.contains(&p.id)).cloned().collect();
    let out = translate_stage(&todo, &manifest.language, &target, client.as_ref(), args.concurrency)?;
    let records: Vec<&TranslationRecord> = out.translations.iter().map(|t| &t.record).collect();
    append_jsonl(&args.out, &records, args.resume)?;
    for f in &out.failures {
        tracing::warn!(problem_id = %f.problem_id, error = %f.error, "translation failed");
    }
    eprintln!("{} translated, {} failed, {} already done", records.len(), out.failures.len(), done.len());
    Ok(())
}
