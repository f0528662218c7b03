use std::path::{Path, PathBuf};

use forge_core::qe::{Aggregate, DEFAULT_HIGH_QUALITY_THRESHOLD, DEFAULT_THRESHOLD};
use serde::{Deserialize, Serialize};

use crate::clean::RuleSpec;
use crate::corruption::DEFAULT_MAX_ROUNDS;
use crate::dedup::DEFAULT_DEDUP_THRESHOLD;
use crate::http::RetryPolicy;
use crate::PipelineError;

/// Pipeline stages in execution order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Clean,
    Blocklist,
    Dedup,
    Corruption,
    Translate,
    Qe,
    Compose,
    Manifest,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Clean,
        Stage::Blocklist,
        Stage::Dedup,
        Stage::Corruption,
        Stage::Translate,
        Stage::Qe,
        Stage::Compose,
        Stage::Manifest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Clean => "clean",
            Stage::Blocklist => "blocklist",
            Stage::Dedup => "dedup",
            Stage::Corruption => "corruption",
            Stage::Translate => "translate",
            Stage::Qe => "qe",
            Stage::Compose => "compose",
            Stage::Manifest => "manifest",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientSpec {
    Http {
        id: String,
        endpoint: String,
    },
    /// Returns its input; for dry runs.
    Echo {
        id: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default = "default_dedup")]
    pub dedup: f64,
    #[serde(default = "default_qe")]
    pub qe: f64,
    #[serde(default = "default_qe_hq")]
    pub qe_high_quality: f64,
    #[serde(default = "default_aggregate")]
    pub aggregate: Aggregate,
}

fn default_dedup() -> f64 {
    DEFAULT_DEDUP_THRESHOLD
}
fn default_qe() -> f64 {
    DEFAULT_THRESHOLD
}
fn default_qe_hq() -> f64 {
    DEFAULT_HIGH_QUALITY_THRESHOLD
}
fn default_aggregate() -> Aggregate {
    Aggregate::Max
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            dedup: default_dedup(),
            qe: default_qe(),
            qe_high_quality: default_qe_hq(),
            aggregate: default_aggregate(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeSettings {
    #[serde(default)]
    pub font_dir: Option<PathBuf>,
    #[serde(default = "default_initial_font")]
    pub initial_font: f32,
    #[serde(default = "default_min_font")]
    pub min_font: f32,
    #[serde(default = "default_line_spacing")]
    pub line_spacing: f32,
}

fn default_initial_font() -> f32 {
    16.0
}
fn default_min_font() -> f32 {
    6.0
}
fn default_line_spacing() -> f32 {
    1.2
}

impl Default for ComposeSettings {
    fn default() -> Self {
        Self {
            font_dir: None,
            initial_font: default_initial_font(),
            min_font: default_min_font(),
            line_spacing: default_line_spacing(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewSettings {
    /// Review store directory; without one, flagged samples are only logged.
    #[serde(default)]
    pub store: Option<PathBuf>,
    /// Queue a translation-scoring task for every sample that passes the gate.
    #[serde(default)]
    pub enqueue_translation_scores: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub source_lang: String,
    /// Target languages.
    #[serde(default)]
    pub languages: Vec<String>,
    /// Source problem pool, a manifest file.
    pub pool: PathBuf,
    pub out_dir: PathBuf,
    #[serde(default)]
    pub images_dir: Option<PathBuf>,
    #[serde(default = "default_stages")]
    pub stages: Vec<Stage>,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default)]
    pub blocklist: Option<PathBuf>,
    #[serde(default)]
    pub clean_rules: Option<Vec<RuleSpec>>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub translator: Option<ClientSpec>,
    #[serde(default)]
    pub backtranslators: Vec<ClientSpec>,
    #[serde(default)]
    pub judge: Option<ClientSpec>,
    #[serde(default)]
    pub retry: RetryPolicy,
    #[serde(default = "default_max_rounds")]
    pub max_corruption_rounds: u32,
    #[serde(default)]
    pub compose: ComposeSettings,
    #[serde(default)]
    pub review: ReviewSettings,
}

fn default_stages() -> Vec<Stage> {
    vec![Stage::Clean, Stage::Dedup, Stage::Translate, Stage::Qe, Stage::Manifest]
}
fn default_concurrency() -> usize {
    8
}
fn default_max_rounds() -> u32 {
    DEFAULT_MAX_ROUNDS
}

impl PipelineConfig {
    /// Parse a TOML config; relative paths are taken from the file's directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.into(), source })?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.pool);
        fix(&mut self.out_dir);
        for p in [&mut self.images_dir, &mut self.blocklist, &mut self.compose.font_dir, &mut self.review.store] {
            if let Some(p) = p.as_mut() {
                fix(p);
            }
        }
    }

    pub fn has(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let err = |m: String| Err(PipelineError::Config(m));
        if !self.stages.windows(2).all(|w| w[0] < w[1]) {
            return err(format!("stages must be unique and in pipeline order {:?}", Stage::ALL.map(Stage::name)));
        }
        if !self.has(Stage::Manifest) {
            return err("the manifest stage is required".into());
        }
        if self.has(Stage::Translate) != self.has(Stage::Qe) {
            return err("translate and qe stages go together: every emitted translation must pass the gate".into());
        }
        if self.has(Stage::Translate) {
            if self.languages.is_empty() {
                return err("translate stage needs at least one target language".into());
            }
            if self.translator.is_none() {
                return err("translate stage needs a translator".into());
            }
            if self.backtranslators.is_empty() {
                return err("qe stage needs at least one backtranslator".into());
            }
        }
        if self.languages.contains(&self.source_lang) {
            return err(format!("source language {} is also a target", self.source_lang));
        }
        if self.has(Stage::Corruption) && self.judge.is_none() {
            return err("corruption stage needs a judge".into());
        }
        if (self.has(Stage::Corruption) || self.has(Stage::Compose)) && self.images_dir.is_none() {
            return err("corruption and compose stages need images_dir".into());
        }
        if self.has(Stage::Blocklist) && self.blocklist.is_none() {
            return err("blocklist stage needs a blocklist file".into());
        }
        if !(self.thresholds.dedup > 0.0 && self.thresholds.dedup <= 1.0) {
            return err(format!("dedup threshold {} outside (0, 1]", self.thresholds.dedup));
        }
        if self.concurrency == 0 {
            return err("concurrency must be >= 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
source_lang = "eng"
languages = ["cat", "deu"]
pool = "pool.jsonl"
out_dir = "out"
stages = ["dedup", "translate", "qe", "manifest"]
translator = { kind = "echo", id = "t" }
backtranslators = [{ kind = "http", id = "b1", endpoint = "http://localhost:9000" }]

[thresholds]
qe = 0.7

[retry]
retries = 1
"#;

    #[test]
    fn parses_with_defaults() {
        let mut cfg: PipelineConfig = toml::from_str(MINIMAL).unwrap();
        cfg.resolve_paths(Path::new("/data"));
        cfg.validate().unwrap();
        assert_eq!(cfg.pool, PathBuf::from("/data/pool.jsonl"));
        assert_eq!(cfg.thresholds.qe, 0.7);
        assert_eq!(cfg.thresholds.qe_high_quality, 0.85);
        assert_eq!(cfg.thresholds.dedup, 0.90);
        assert_eq!(cfg.retry, RetryPolicy { retries: 1, base_delay_ms: 1000 });
        assert_eq!(cfg.concurrency, 8);
        assert_eq!(cfg.translator, Some(ClientSpec::Echo { id: "t".into() }));
    }

    #[test]
    fn rejects_bad_stage_sets() {
        let base: PipelineConfig = toml::from_str(MINIMAL).unwrap();
        let mut cfg = base.clone();
        cfg.stages = vec![Stage::Translate, Stage::Manifest];
        assert!(cfg.validate().is_err());
        cfg.stages = vec![Stage::Qe, Stage::Translate, Stage::Manifest];
        assert!(cfg.validate().is_err());
        cfg.stages = vec![Stage::Dedup];
        assert!(cfg.validate().is_err());
        let mut cfg = base.clone();
        cfg.stages = vec![Stage::Corruption, Stage::Manifest];
        assert!(cfg.validate().is_err());
        let mut cfg = base;
        cfg.languages.push("eng".into());
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(toml::from_str::<PipelineConfig>(&format!("{MINIMAL}\n[compose]\nfont = 3\n")).is_err());
    }
}
