use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use forge_core::client::ModelClient;
use forge_core::eval::human::{blocks_by_thirds, read_human_csv, DifficultyTable};
use forge_core::eval::{
    aggregate, difficulty_indices, evaluate, percentile_rank, EvalOptions, EvalResult, HumanRecord, ParsedAnswer,
    PresenceTable, PromptCatalog,
};
use forge_core::mock::{ConstantClient, KeyOracleClient, UniformRandomClient};
use forge_core::model::{read_manifest, DatasetManifest, LanguageTag, ProblemRecord};
use forge_pipeline::http::{HttpModelClient, RetryPolicy};
use serde::Serialize;

use crate::io::{print_json, read_jsonl, write_jsonl};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mock {
    /// Always the correct key.
    Oracle,
    /// A uniformly random option.
    Uniform,
    /// Always option A.
    AlwaysA,
}

#[derive(clap::Args)]
pub struct EvalArgs {
    /// Manifest to evaluate, repeatable (one per language).
    #[arg(long = "manifest", required = true)]
    manifests: Vec<PathBuf>,
    /// Model service base URL.
    #[arg(long, required_unless_present = "mock", conflicts_with = "mock")]
    model_endpoint: Option<String>,
    #[arg(long, default_value = "model")]
    model_id: String,
    /// Use an offline mock model instead of a service.
    #[arg(long, value_enum)]
    mock: Option<Mock>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    runs: usize,
    #[arg(long, default_value_t = 8)]
    concurrency: usize,
    /// Retries per request after a transport error, 5xx or 429.
    #[arg(long, default_value_t = 3)]
    retries: u32,
    /// Where `image_ref` paths resolve; defaults to each manifest's directory.
    #[arg(long)]
    images_dir: Option<PathBuf>,
    /// Raw results, one JSON object per line.
    #[arg(long)]
    out: PathBuf,
}

fn image_root(args: &EvalArgs, manifest: &Path) -> PathBuf {
    match &args.images_dir {
        Some(d) => d.clone(),
        None => manifest.parent().map(PathBuf::from).unwrap_or_default(),
    }
}

fn run_all<C: ModelClient>(
    client: &C,
    manifests: &[DatasetManifest],
    prompts: &PromptCatalog,
    opts: EvalOptions,
) -> Result<Vec<EvalResult>> {
    let mut out = Vec::new();
    for m in manifests {
        out.extend(evaluate(m, client, prompts, opts).with_context(|| format!("evaluating {}", m.language))?);
    }
    Ok(out)
}

pub fn eval(args: EvalArgs) -> Result<()> {
    let manifests = args
        .manifests
        .iter()
        .map(|p| read_manifest(p).with_context(|| p.display().to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let prompts = PromptCatalog::builtin();
    prompts.check_covers(manifests.iter().map(|m| &m.language))?;
    let opts = EvalOptions { runs: args.runs, concurrency: args.concurrency };
    let results = match (args.mock, &args.model_endpoint) {
        (Some(Mock::Oracle), _) => run_all(&KeyOracleClient::new(&manifests), &manifests, &prompts, opts)?,
        (Some(Mock::Uniform), _) => run_all(&UniformRandomClient::new(args.seed), &manifests, &prompts, opts)?,
        (Some(Mock::AlwaysA), _) => run_all(&ConstantClient::always_a(), &manifests, &prompts, opts)?,
        (None, Some(endpoint)) => {
            let retry = RetryPolicy { retries: args.retries, ..RetryPolicy::default() };
            let mut out = Vec::new();
            for (m, path) in manifests.iter().zip(&args.manifests) {
                let client = HttpModelClient::new(args.model_id.clone(), endpoint, image_root(&args, path), retry)?;
                out.extend(run_all(&client, std::slice::from_ref(m), &prompts, opts)?);
            }
            out
        }
        (None, None) => bail!("either --model-endpoint or --mock is required"),
    };
    write_jsonl(Some(&args.out), &results)?;
    let errors = results.iter().filter(|r| r.error.is_some()).count();
    if errors > 0 {
        tracing::warn!(errors, "some requests failed and were scored as no answer");
    }
    let languages = languages_of(&results)?;
    print_json(&aggregate(&results, &languages, &PresenceTable::known())?)
}

/// Distinct languages in order of first appearance.
fn languages_of(results: &[EvalResult]) -> Result<Vec<LanguageTag>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in results {
        if seen.insert(r.language.clone()) {
            out.push(LanguageTag::new(r.language.clone())?);
        }
    }
    Ok(out)
}

#[derive(clap::Args)]
pub struct ReportArgs {
    /// Results written by `forge eval`.
    #[arg(long)]
    results: PathBuf,
    /// Manifests that give each problem's level and number; repeatable.
    #[arg(long = "manifest")]
    manifests: Vec<PathBuf>,
    /// Participant outcomes: `participant_id,level,problem_number,outcome`.
    #[arg(long)]
    human_csv: Option<PathBuf>,
    /// Language whose results are compared with the participants.
    #[arg(long, default_value = "eng")]
    lang: String,
}

#[derive(Serialize)]
struct LevelComparison {
    level: u8,
    problems: usize,
    model_score: f64,
    percentile: f64,
    indices: DifficultyTable,
}

#[derive(Serialize)]
struct Report {
    accuracy: forge_core::eval::AccuracyReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    human: Vec<LevelComparison>,
}

pub fn report(args: ReportArgs) -> Result<()> {
    let results: Vec<EvalResult> = read_jsonl(&args.results)?;
    if results.is_empty() {
        bail!("{} holds no results", args.results.display());
    }
    let accuracy = aggregate(&results, &languages_of(&results)?, &PresenceTable::known())?;
    let mut human = Vec::new();
    if let Some(csv) = &args.human_csv {
        if args.manifests.is_empty() {
            bail!("--human-csv needs --manifest to map problems to levels");
        }
        let mut problems: BTreeMap<String, ProblemRecord> = BTreeMap::new();
        for path in &args.manifests {
            for p in read_manifest(path)?.entries {
                problems.insert(p.id.clone(), p);
            }
        }
        let file = File::open(csv).with_context(|| format!("opening {}", csv.display()))?;
        let humans = read_human_csv(file)?;
        let mine: Vec<&EvalResult> = results.iter().filter(|r| r.language == args.lang).collect();
        if mine.is_empty() {
            bail!("no results for language {}", args.lang);
        }
        human = compare_levels(&mine, &problems, &humans)?;
    }
    print_json(&Report { accuracy, human })
}

/// Per level: the model's score and percentile among participants, and the
/// per-problem indices, all on the problems both sides attempted.
fn compare_levels(
    results: &[&EvalResult],
    problems: &BTreeMap<String, ProblemRecord>,
    humans: &[HumanRecord],
) -> Result<Vec<LevelComparison>> {
    // (level, number) -> per-run outcomes
    let mut by_problem: BTreeMap<(u8, u32), Vec<&EvalResult>> = BTreeMap::new();
    for r in results {
        let p = problems.get(&r.problem_id).with_context(|| format!("problem {} is in no manifest", r.problem_id))?;
        by_problem.entry((p.level, p.number)).or_default().push(r);
    }
    let runs: BTreeSet<usize> = results.iter().map(|r| r.run_index).collect();
    let levels: BTreeSet<u8> = humans.iter().map(|h| h.level).collect();
    let mut out = Vec::new();
    for level in levels {
        let group: Vec<&HumanRecord> = humans.iter().filter(|h| h.level == level).collect();
        let human_problems: BTreeSet<u32> = group.iter().flat_map(|h| h.outcomes.keys().copied()).collect();
        let shared: BTreeSet<u32> =
            human_problems.into_iter().filter(|n| by_problem.contains_key(&(level, *n))).collect();
        if shared.is_empty() {
            tracing::warn!(level, "no evaluated problems overlap with the participants; level skipped");
            continue;
        }
        let restricted: Vec<HumanRecord> = group.iter().map(|h| h.restricted_to(&shared)).collect();

        let mut model_accuracy = BTreeMap::new();
        let mut total = 0.0;
        for &n in &shared {
            let rs = &by_problem[&(level, n)];
            let correct = rs.iter().filter(|r| r.correct).count() as f64;
            let blank = rs.iter().filter(|r| r.parsed == ParsedAnswer::N).count() as f64;
            model_accuracy.insert(n, correct / rs.len() as f64);
            total += correct + blank / 5.0;
        }
        let model_score = total / runs.len() as f64;
        let percentile = percentile_rank(model_score, &restricted, level)?;
        let indices = difficulty_indices(&restricted, &model_accuracy, &blocks_by_thirds(&shared))?;
        out.push(LevelComparison { level, problems: shared.len(), model_score, percentile, indices });
    }
    Ok(out)
}
