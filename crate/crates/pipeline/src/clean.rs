//! Regex normalizer for text-extraction artifacts. The default rules are this
//! project's own; pass custom rules through the pipeline config.

use forge_core::model::ProblemRecord;
use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub pattern: String,
    #[serde(default)]
    pub replacement: String,
}

#[derive(Clone, Debug)]
pub struct Normalizer {
    rules: Vec<(Regex, String)>,
}

impl Normalizer {
    pub fn new(specs: &[RuleSpec]) -> Result<Self, regex::Error> {
        let rules = specs
            .iter()
            .map(|s| Ok((Regex::new(&s.pattern)?, s.replacement.clone())))
            .collect::<Result<_, regex::Error>>()?;
        Ok(Self { rules })
    }

    /// Default rules, applied in order:
    /// join words hyphenated across a line break, drop soft hyphens and
    /// zero-width characters, turn remaining line breaks inside a paragraph
    /// into spaces, collapse blank-line runs and space runs.
    pub fn default_rules() -> Vec<RuleSpec> {
        [
            (r"(\p{L})-\n(\p{Ll})", "$1$2"),
            (r"[\u{00AD}\u{200B}\u{200C}\u{200D}\u{FEFF}]", ""),
            (r"([^\n])\n([^\n])", "$1 $2"),
            (r"\n{3,}", "\n\n"),
            (r"[ \t\u{00A0}]+", " "),
        ]
        .into_iter()
        .map(|(p, r)| RuleSpec { pattern: p.into(), replacement: r.into() })
        .collect()
    }

    pub fn apply(&self, text: &str) -> String {
        let mut s = text.to_string();
        for (re, rep) in &self.rules {
            s = re.replace_all(&s, rep.as_str()).into_owned();
        }
        s.trim().to_string()
    }

    pub fn clean_record(&self, record: &ProblemRecord) -> ProblemRecord {
        let mut out = record.clone();
        out.question_text = self.apply(&record.question_text);
        for o in out.options.iter_mut() {
            *o = self.apply(o);
        }
        out
    }
}

impl Default for Normalizer {
    fn default() -> Self {
        Self::new(&Self::default_rules()).expect("default rules compile")
    }
}
