//! End-to-end pipeline run driven by a [`PipelineConfig`].
//!
//! Output layout under `out_dir`:
//! `{lang}/standard.jsonl`, `{lang}/high_quality.jsonl`, `{lang}/translations.jsonl`,
//! `{lang}/qe_reports.jsonl`, `{lang}/images/{id}.png`, `failures.jsonl` and
//! `audit.jsonl`. Every file is written in input order, so a run's output does
//! not depend on the worker count.

use std::collections::{HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use forge_compose::{compose_file, ComposeError, FontStack, PasteOptions, WrapConfig};
use forge_core::model::{
    check_split_containment, read_manifest, write_manifest, DatasetManifest, LanguageTag, ProblemRecord, Split,
};
use forge_core::qe::{GateConfig, QualityReport, Verdict};
use forge_core::textmetrics::ChrfParams;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::blocklist::{apply_blocklist, read_blocklist};
use crate::clean::Normalizer;
use crate::clients::{EchoTranslator, JudgeClient, TranslationClient};
use crate::config::{ClientSpec, PipelineConfig, Stage};
use crate::corruption::{apply_fix, corruption_loop, JudgeItem};
use crate::dedup::dedup;
use crate::http::{HttpJudgeClient, HttpTranslationClient};
use crate::review::{ReviewStore, TaskKind, TaskPayload, TaskStatus};
use crate::stages::{joined_text, pool, qe_stage, translate_stage, StageFailure, TranslatedProblem};
use crate::PipelineError;

pub const STANDARD_FILE: &str = "standard.jsonl";
pub const HIGH_QUALITY_FILE: &str = "high_quality.jsonl";
pub const TRANSLATIONS_FILE: &str = "translations.jsonl";
pub const QE_REPORTS_FILE: &str = "qe_reports.jsonl";
pub const FAILURES_FILE: &str = "failures.jsonl";
pub const AUDIT_FILE: &str = "audit.jsonl";

/// The external services a run talks to.
pub struct Clients {
    pub translator: Option<Box<dyn TranslationClient>>,
    pub backtranslators: Vec<Box<dyn TranslationClient>>,
    pub judge: Option<Box<dyn JudgeClient>>,
}

impl Clients {
    pub fn from_config(cfg: &PipelineConfig) -> Result<Self, PipelineError> {
        let translation = |spec: &ClientSpec| -> Result<Box<dyn TranslationClient>, PipelineError> {
            Ok(match spec {
                ClientSpec::Http { id, endpoint } => {
                    Box::new(HttpTranslationClient::new(id.clone(), endpoint, cfg.retry)?)
                }
                ClientSpec::Echo { id } => Box::new(EchoTranslator::new(id.clone())),
            })
        };
        let judge = match &cfg.judge {
            None => None,
            Some(ClientSpec::Http { id, endpoint }) => {
                Some(Box::new(HttpJudgeClient::new(id.clone(), endpoint, cfg.retry)?) as Box<dyn JudgeClient>)
            }
            Some(ClientSpec::Echo { .. }) => {
                return Err(PipelineError::Config("the judge must be an http client".into()));
            }
        };
        Ok(Self {
            translator: cfg.translator.as_ref().map(translation).transpose()?,
            backtranslators: cfg.backtranslators.iter().map(translation).collect::<Result<_, _>>()?,
            judge,
        })
    }
}

/// One line of `audit.jsonl`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEvent {
    pub stage: String,
    pub problem_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LanguageSummary {
    pub language: String,
    pub translated: usize,
    /// Translations taken from an earlier run.
    pub reused: usize,
    pub standard: usize,
    pub high_quality: usize,
    /// Excluded by a reviewer.
    pub discarded: usize,
    /// Excluded because the text did not fit its box; queued for adjustment.
    pub no_fit: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub pool: usize,
    pub blocklisted: usize,
    pub duplicates: usize,
    /// Flagged as corrupted and still waiting for a reviewer.
    pub pending_corruption: usize,
    /// Problems that entered translation.
    pub base: usize,
    pub languages: Vec<LanguageSummary>,
    pub failures: usize,
}

struct Audit {
    events: Vec<AuditEvent>,
}

impl Audit {
    fn push(&mut self, stage: Stage, problem_id: &str, language: Option<&str>, outcome: &str, detail: Option<String>) {
        self.events.push(AuditEvent {
            stage: stage.name().into(),
            problem_id: problem_id.into(),
            language: language.map(String::from),
            outcome: outcome.into(),
            detail,
        });
    }
}

fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<(), PipelineError> {
    let io_err = |e| PipelineError::io(path, e);
    let mut out = BufWriter::new(File::create(path).map_err(io_err)?);
    for item in items {
        serde_json::to_writer(&mut out, &item).map_err(|e| io_err(e.into()))?;
        out.write_all(b"\n").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Read a JSON-lines file; a missing file reads as empty.
fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(PipelineError::io(path, e)),
    };
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| PipelineError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(&line)
            .map_err(|e| PipelineError::Config(format!("{}:{}: {e}", path.display(), n + 1)))?;
        out.push(item);
    }
    Ok(out)
}

fn create_dir(path: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(path).map_err(|e| PipelineError::io(path, e))
}

pub fn run_pipeline(cfg: &PipelineConfig, resume: bool) -> Result<RunSummary, PipelineError> {
    let clients = Clients::from_config(cfg)?;
    run_pipeline_with(cfg, &clients, resume)
}

/// Run the configured stages. With `resume`, translations and quality
/// reports from an earlier run are reused wherever their inputs are
/// unchanged.
pub fn run_pipeline_with(cfg: &PipelineConfig, clients: &Clients, resume: bool) -> Result<RunSummary, PipelineError> {
    cfg.validate()?;
    let source = LanguageTag::new(cfg.source_lang.clone())?;
    let targets: Vec<LanguageTag> =
        cfg.languages.iter().map(|c| LanguageTag::new(c.clone())).collect::<Result<_, _>>()?;
    create_dir(&cfg.out_dir)?;
    let store = match &cfg.review.store {
        Some(dir) => ReviewStore::open(dir)?,
        None => ReviewStore::in_memory(),
    };
    let mut audit = Audit { events: Vec::new() };
    let mut failures: Vec<StageFailure> = Vec::new();
    let mut summary = RunSummary::default();

    let mut records = read_manifest(&cfg.pool)?.entries;
    for r in &records {
        r.validate()?;
    }
    summary.pool = records.len();

    if cfg.has(Stage::Clean) {
        let rules = cfg.clean_rules.clone().unwrap_or_else(Normalizer::default_rules);
        let normalizer = Normalizer::new(&rules).map_err(|e| PipelineError::Config(format!("clean rule: {e}")))?;
        records = records.iter().map(|r| normalizer.clean_record(r)).collect();
    }

    if cfg.has(Stage::Blocklist) {
        let path = cfg.blocklist.as_deref().expect("validated");
        let blocked = read_blocklist(path).map_err(|e| PipelineError::io(path, e))?;
        let (kept, removed) = apply_blocklist(records, &blocked);
        for id in &removed {
            audit.push(Stage::Blocklist, id, None, "removed", None);
        }
        summary.blocklisted = removed.len();
        records = kept;
    }

    if cfg.has(Stage::Dedup) {
        let outcome = dedup(records, cfg.thresholds.dedup);
        for d in &outcome.dropped {
            let detail = format!("similar to {} ({:.4})", d.kept, d.similarity);
            audit.push(Stage::Dedup, &d.id, None, "dropped", Some(detail));
        }
        summary.duplicates = outcome.dropped.len();
        records = outcome.kept;
    }

    if cfg.has(Stage::Corruption) {
        let images = cfg.images_dir.clone().expect("validated");
        let judge = clients.judge.as_deref().ok_or_else(|| PipelineError::Config("no judge client".into()))?;
        let load = |r: &ProblemRecord| -> Result<(JudgeItem, Option<(u32, u32)>), PipelineError> {
            let path = images.join(&r.image_ref);
            let image = fs::read(&path).map_err(|e| PipelineError::io(&path, e))?;
            let size = image::image_dimensions(&path).ok();
            Ok((JudgeItem { problem_id: r.id.clone(), image, transcript: joined_text(r) }, size))
        };
        let outcome = corruption_loop(records, &load, judge, &store, cfg.max_corruption_rounds, cfg.concurrency)?;
        for f in &outcome.flags {
            let outcome = if f.resolved { "resolved" } else { "flagged" };
            audit.push(Stage::Corruption, &f.problem_id, None, outcome, Some(format!("round {}", f.round)));
        }
        summary.pending_corruption = outcome.pending.len();
        records = outcome.clean;
    }

    records.retain(|r| !store.is_discarded(&r.id, source.code()));
    summary.base = records.len();
    write_language(cfg, &source, &records, &records, &mut audit)?;

    if cfg.has(Stage::Translate) {
        let gate_cfg = GateConfig::new(cfg.thresholds.qe, cfg.thresholds.qe_high_quality, cfg.thresholds.aggregate)?;
        let fonts = if cfg.has(Stage::Compose) {
            Some(match &cfg.compose.font_dir {
                Some(dir) => FontStack::from_dir(dir)?,
                None => FontStack::pinned(),
            })
        } else {
            None
        };
        for target in &targets {
            let lang = translate_language(
                cfg,
                clients,
                &store,
                &source,
                target,
                &records,
                &gate_cfg,
                fonts.as_ref(),
                resume,
                &mut audit,
                &mut failures,
            )?;
            summary.languages.push(lang);
        }
    }

    summary.failures = failures.len();
    write_jsonl(&cfg.out_dir.join(FAILURES_FILE), &failures)?;
    write_jsonl(&cfg.out_dir.join(AUDIT_FILE), &audit.events)?;
    Ok(summary)
}

/// Write both split manifests of one language and check containment.
fn write_language(
    cfg: &PipelineConfig,
    lang: &LanguageTag,
    standard: &[ProblemRecord],
    high_quality: &[ProblemRecord],
    audit: &mut Audit,
) -> Result<(), PipelineError> {
    let dir = cfg.out_dir.join(lang.code());
    create_dir(&dir)?;
    let std_m = DatasetManifest { language: lang.clone(), split: Split::Standard, entries: standard.to_vec() };
    let hq_m = DatasetManifest { language: lang.clone(), split: Split::HighQuality, entries: high_quality.to_vec() };
    check_split_containment(&std_m, &hq_m)?;
    write_manifest(&std_m, &dir.join(STANDARD_FILE))?;
    write_manifest(&hq_m, &dir.join(HIGH_QUALITY_FILE))?;
    for r in standard {
        let split = if hq_m.contains(&r.id) { "high_quality" } else { "standard" };
        audit.push(Stage::Manifest, &r.id, Some(lang.code()), split, None);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn translate_language(
    cfg: &PipelineConfig,
    clients: &Clients,
    store: &ReviewStore,
    source: &LanguageTag,
    target: &LanguageTag,
    records: &[ProblemRecord],
    gate_cfg: &GateConfig,
    fonts: Option<&FontStack>,
    resume: bool,
    audit: &mut Audit,
    failures: &mut Vec<StageFailure>,
) -> Result<LanguageSummary, PipelineError> {
    let code = target.code();
    let dir = cfg.out_dir.join(code);
    create_dir(&dir)?;
    let translator = clients.translator.as_deref().ok_or_else(|| PipelineError::Config("no translator".into()))?;
    let backtranslators: Vec<&dyn TranslationClient> = clients.backtranslators.iter().map(|b| b.as_ref()).collect();
    let mut summary = LanguageSummary { language: code.into(), ..LanguageSummary::default() };

    // Translate, reusing earlier output whose source text and translator match.
    let previous: HashMap<String, TranslatedProblem> = if resume {
        read_jsonl::<TranslatedProblem>(&dir.join(TRANSLATIONS_FILE))?
            .into_iter()
            .map(|t| (t.record.problem_id.clone(), t))
            .collect()
    } else {
        HashMap::new()
    };
    let reusable = |r: &ProblemRecord| {
        previous.get(&r.id).filter(|t| {
            t.record.source_text == joined_text(r)
                && t.record.translator_id == translator.id()
                && t.record.source_lang == *source
                && t.record.target_lang == *target
        })
    };
    let todo: Vec<ProblemRecord> = records.iter().filter(|r| reusable(r).is_none()).cloned().collect();
    let fresh = translate_stage(&todo, source, target, translator, cfg.concurrency)?;
    let mut fresh_by_id: HashMap<String, TranslatedProblem> =
        fresh.translations.into_iter().map(|t| (t.record.problem_id.clone(), t)).collect();
    let failed: HashMap<String, String> =
        fresh.failures.iter().map(|f| (f.problem_id.clone(), f.error.clone())).collect();
    let mut translations = Vec::with_capacity(records.len());
    let mut reused_ids: HashSet<&str> = HashSet::new();
    for r in records {
        if let Some(t) = reusable(r) {
            audit.push(Stage::Translate, &r.id, Some(code), "reused", None);
            summary.reused += 1;
            reused_ids.insert(r.id.as_str());
            translations.push(t.clone());
        } else if let Some(t) = fresh_by_id.remove(&r.id) {
            let detail = (!t.length_warnings.is_empty()).then(|| format!("length warnings {:?}", t.length_warnings));
            audit.push(Stage::Translate, &r.id, Some(code), "translated", detail);
            translations.push(t);
        } else {
            audit.push(Stage::Translate, &r.id, Some(code), "failed", failed.get(&r.id).cloned());
        }
    }
    failures.extend(fresh.failures);
    summary.translated = translations.len();
    write_jsonl(&dir.join(TRANSLATIONS_FILE), &translations)?;

    // Gate, reusing reports for reused translations under the same settings.
    let bt_ids: Vec<String> = backtranslators.iter().map(|b| b.id().to_string()).collect();
    let old_reports: HashMap<String, QualityReport> = if resume {
        read_jsonl::<QualityReport>(&dir.join(QE_REPORTS_FILE))?
            .into_iter()
            .map(|q| (q.problem_id.clone(), q))
            .collect()
    } else {
        HashMap::new()
    };
    let reuse_report = |t: &TranslatedProblem| -> Option<&QualityReport> {
        if !reused_ids.contains(t.record.problem_id.as_str()) {
            return None;
        }
        old_reports.get(&t.record.problem_id).filter(|q| {
            q.backtranslator_ids == bt_ids
                && q.threshold == gate_cfg.threshold()
                && q.high_quality_threshold == gate_cfg.high_quality_threshold()
                && q.aggregate == gate_cfg.aggregate()
        })
    };
    let to_gate: Vec<TranslatedProblem> = translations.iter().filter(|t| reuse_report(t).is_none()).cloned().collect();
    let qe = qe_stage(&to_gate, &backtranslators, gate_cfg, &ChrfParams::default(), cfg.concurrency)?;
    let mut qe_by_id: HashMap<String, QualityReport> =
        qe.reports.into_iter().map(|q| (q.problem_id.clone(), q)).collect();
    let mut reports: Vec<QualityReport> = Vec::with_capacity(translations.len());
    for t in &translations {
        let id = &t.record.problem_id;
        let report = match reuse_report(t) {
            Some(q) => Some(q.clone()),
            None => qe_by_id.remove(id),
        };
        match report {
            Some(q) => {
                let outcome = match q.verdict {
                    Verdict::Fail => "fail",
                    Verdict::Pass => "pass",
                    Verdict::PassHighQuality => "pass_high_quality",
                };
                audit.push(Stage::Qe, id, Some(code), outcome, Some(format!("m={:.6}", q.aggregate_m)));
                reports.push(q);
            }
            None => audit.push(Stage::Qe, id, Some(code), "failed", None),
        }
    }
    failures.extend(qe.failures);
    write_jsonl(&dir.join(QE_REPORTS_FILE), &reports)?;

    // Assemble the splits in base order.
    let by_id: HashMap<&str, &ProblemRecord> = records.iter().map(|r| (r.id.as_str(), r)).collect();
    let verdicts: HashMap<&str, Verdict> = reports.iter().map(|q| (q.problem_id.as_str(), q.verdict)).collect();
    let mut passing: Vec<(ProblemRecord, bool)> = Vec::new();
    for t in &translations {
        let id = t.record.problem_id.as_str();
        let Some(verdict) = verdicts.get(id).copied().filter(|v| v.is_standard()) else { continue };
        if cfg.review.enqueue_translation_scores {
            let payload = TaskPayload {
                source_text: Some(t.record.source_text.clone()),
                target_text: Some(t.record.target_text.clone()),
                ..TaskPayload::default()
            };
            store.enqueue_if_absent(TaskKind::TranslationScore, id, Some(code.to_string()), payload)?;
        }
        if store.is_discarded(id, code) {
            audit.push(Stage::Manifest, id, Some(code), "discarded", None);
            summary.discarded += 1;
            continue;
        }
        let mut rec = t.apply_to(by_id[id]);
        for task in store.tasks() {
            let applies = task.kind == TaskKind::BboxAdjust
                && task.status == TaskStatus::Fixed
                && task.problem_id == id
                && task.language.as_deref() == Some(code);
            if let (true, Some(fix)) = (applies, &task.fix) {
                apply_fix(&mut rec, fix);
            }
        }
        passing.push((rec, verdict.is_high_quality()));
    }

    if let Some(fonts) = fonts {
        passing = compose_language(cfg, store, target, passing, fonts, audit, failures, &mut summary)?;
    }

    let standard: Vec<ProblemRecord> = passing.iter().map(|(r, _)| r.clone()).collect();
    let high_quality: Vec<ProblemRecord> = passing.iter().filter(|(_, hq)| *hq).map(|(r, _)| r.clone()).collect();
    summary.standard = standard.len();
    summary.high_quality = high_quality.len();
    write_language(cfg, target, &standard, &high_quality, audit)?;
    Ok(summary)
}

/// Render each passing sample's translated question into its image. A sample
/// whose text does not fit is queued for a bbox adjustment and held back.
#[allow(clippy::too_many_arguments)]
fn compose_language(
    cfg: &PipelineConfig,
    store: &ReviewStore,
    target: &LanguageTag,
    passing: Vec<(ProblemRecord, bool)>,
    fonts: &FontStack,
    audit: &mut Audit,
    failures: &mut Vec<StageFailure>,
    summary: &mut LanguageSummary,
) -> Result<Vec<(ProblemRecord, bool)>, PipelineError> {
    let code = target.code();
    let images = cfg.images_dir.as_deref().expect("validated");
    let out_dir = cfg.out_dir.join(code).join("images");
    create_dir(&out_dir)?;
    let wrap = WrapConfig {
        initial_font: cfg.compose.initial_font,
        min_font: cfg.compose.min_font,
        line_spacing: cfg.compose.line_spacing,
        ..WrapConfig::default()
    };
    let rendered: Vec<Result<PathBuf, ComposeError>> = pool(cfg.concurrency)?.install(|| {
        passing
            .par_iter()
            .map(|(rec, _)| {
                let rel = PathBuf::from("images").join(format!("{}.png", rec.id));
                compose_file(
                    &images.join(&rec.image_ref),
                    &out_dir.join(format!("{}.png", rec.id)),
                    rec.bbox,
                    &rec.question_text,
                    fonts,
                    &wrap,
                    &PasteOptions::default(),
                )
                .map(|_| rel)
            })
            .collect()
    });
    let mut kept = Vec::with_capacity(passing.len());
    for ((mut rec, hq), result) in passing.into_iter().zip(rendered) {
        match result {
            Ok(rel) => {
                audit.push(Stage::Compose, &rec.id, Some(code), "composed", None);
                rec.image_ref = rel.to_string_lossy().replace('\\', "/");
                kept.push((rec, hq));
            }
            Err(ComposeError::LayoutDoesNotFit) => {
                let size = image::image_dimensions(images.join(&rec.image_ref)).ok();
                let payload = TaskPayload {
                    image_ref: Some(rec.image_ref.clone()),
                    image_size: size,
                    text: Some(rec.question_text.clone()),
                    bbox: Some(rec.bbox),
                    note: Some("translated text does not fit the box".into()),
                    ..TaskPayload::default()
                };
                store.enqueue_unless_open(TaskKind::BboxAdjust, &rec.id, Some(code.to_string()), payload)?;
                audit.push(Stage::Compose, &rec.id, Some(code), "no_fit", None);
                summary.no_fit += 1;
            }
            Err(e) => {
                audit.push(Stage::Compose, &rec.id, Some(code), "failed", Some(e.to_string()));
                failures.push(StageFailure {
                    problem_id: rec.id.clone(),
                    stage: Stage::Compose.name().into(),
                    language: Some(code.into()),
                    error: e.to_string(),
                });
            }
        }
    }
    Ok(kept)
}
