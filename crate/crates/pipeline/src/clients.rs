//! Translation and judge client interfaces with deterministic mocks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use forge_core::client::ClientError;
use forge_core::model::LanguageTag;
use serde::{Deserialize, Serialize};

/// One translation call. Only `text`, `source` and `target` go over the wire;
/// `problem_id` is for logging and mocks.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslateRequest<'a> {
    pub problem_id: &'a str,
    pub text: &'a str,
    pub source: &'a LanguageTag,
    pub target: &'a LanguageTag,
}

pub trait TranslationClient: Send + Sync {
    /// Model identity recorded as `translator_id` / `backtranslator_id`.
    fn id(&self) -> &str;

    fn translate(&self, request: &TranslateRequest<'_>) -> Result<String, ClientError>;
}

/// Output/input character ratio outside `[0.2, 5]` suggests truncation or
/// runaway generation. Flagged, never rejected.
pub fn length_suspicious(source: &str, output: &str) -> bool {
    let (s, o) = (source.chars().count(), output.chars().count());
    if s == 0 {
        return o > 0;
    }
    let ratio = o as f64 / s as f64;
    !(0.2..=5.0).contains(&ratio)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JudgeLabel {
    #[serde(rename = "corrupted")]
    Corrupted,
    #[serde(rename = "not corrupted")]
    NotCorrupted,
}

impl JudgeLabel {
    /// Strict parse of a judge reply: exactly one of the two labels, with
    /// surrounding whitespace ignored.
    pub fn parse(reply: &str) -> Result<Self, ClientError> {
        match reply.trim() {
            "corrupted" => Ok(JudgeLabel::Corrupted),
            "not corrupted" => Ok(JudgeLabel::NotCorrupted),
            other => Err(ClientError::Protocol(format!("unexpected judge label {other:?}"))),
        }
    }
}

impl fmt::Display for JudgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            JudgeLabel::Corrupted => "corrupted",
            JudgeLabel::NotCorrupted => "not corrupted",
        })
    }
}

pub struct JudgeRequest<'a> {
    pub problem_id: &'a str,
    pub image: &'a [u8],
    pub transcript: &'a str,
}

pub trait JudgeClient: Send + Sync {
    fn id(&self) -> &str;

    fn judge(&self, request: &JudgeRequest<'_>) -> Result<JudgeLabel, ClientError>;
}

/// Returns its input unchanged.
#[derive(Clone, Debug)]
pub struct EchoTranslator {
    id: String,
}

impl EchoTranslator {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into() }
    }
}

impl TranslationClient for EchoTranslator {
    fn id(&self) -> &str {
        &self.id
    }

    fn translate(&self, request: &TranslateRequest<'_>) -> Result<String, ClientError> {
        Ok(request.text.to_string())
    }
}

/// Echo except for selected problems, which get a fixed reply or a
/// transport failure.
#[derive(Clone, Debug)]
pub struct ScriptedTranslator {
    id: String,
    replies: BTreeMap<String, Result<String, ClientError>>,
}

impl ScriptedTranslator {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into(), replies: BTreeMap::new() }
    }

    pub fn reply(mut self, problem_id: impl Into<String>, text: impl Into<String>) -> Self {
        self.replies.insert(problem_id.into(), Ok(text.into()));
        self
    }

    pub fn fail(mut self, problem_id: impl Into<String>) -> Self {
        self.replies.insert(problem_id.into(), Err(ClientError::Transport("scripted failure".into())));
        self
    }
}

impl TranslationClient for ScriptedTranslator {
    fn id(&self) -> &str {
        &self.id
    }

    fn translate(&self, request: &TranslateRequest<'_>) -> Result<String, ClientError> {
        match self.replies.get(request.problem_id) {
            Some(r) => r.clone(),
            None => Ok(request.text.to_string()),
        }
    }
}

/// Flags a fixed set of problems as corrupted.
#[derive(Clone, Debug, Default)]
pub struct FixedJudge {
    flagged: BTreeSet<String>,
}

impl FixedJudge {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(flagged: I) -> Self {
        Self { flagged: flagged.into_iter().map(Into::into).collect() }
    }
}

impl JudgeClient for FixedJudge {
    fn id(&self) -> &str {
        "mock-judge"
    }

    fn judge(&self, request: &JudgeRequest<'_>) -> Result<JudgeLabel, ClientError> {
        Ok(if self.flagged.contains(request.problem_id) { JudgeLabel::Corrupted } else { JudgeLabel::NotCorrupted })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_labels() {
        assert_eq!(JudgeLabel::parse(" corrupted\n").unwrap(), JudgeLabel::Corrupted);
        assert_eq!(JudgeLabel::parse("not corrupted").unwrap(), JudgeLabel::NotCorrupted);
        for bad in ["maybe", "Corrupted", "not corrupted.", ""] {
            assert!(matches!(JudgeLabel::parse(bad), Err(ClientError::Protocol(_))), "{bad}");
        }
    }

    #[test]
    fn length_ratio_flag() {
        assert!(!length_suspicious("abcde", "abcdef"));
        assert!(length_suspicious("abcdefghij", "a"));
        assert!(length_suspicious("a", "abcdefghijkl"));
        assert!(!length_suspicious("abcde", "a"));
        assert!(!length_suspicious("", ""));
    }
}
