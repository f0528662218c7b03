use std::collections::BTreeMap;

use crate::model::LanguageTag;

/// Evaluation system prompts, keyed by language code.
const SYSTEM_PROMPTS: &[(&str, &str)] = &[
    ("afr", include_str!("../../prompts/system/afr.txt")),
    ("cat", include_str!("../../prompts/system/cat.txt")),
    ("deu", include_str!("../../prompts/system/deu.txt")),
    ("eng", include_str!("../../prompts/system/eng.txt")),
    ("est", include_str!("../../prompts/system/est.txt")),
    ("fra", include_str!("../../prompts/system/fra.txt")),
    ("ind", include_str!("../../prompts/system/ind.txt")),
    ("lin", include_str!("../../prompts/system/lin.txt")),
    ("spa", include_str!("../../prompts/system/spa.txt")),
    ("swh", include_str!("../../prompts/system/swh.txt")),
    ("tso", include_str!("../../prompts/system/tso.txt")),
    ("tur", include_str!("../../prompts/system/tur.txt")),
    ("vie", include_str!("../../prompts/system/vie.txt")),
];

pub const CORRUPTION_PROMPT: &str = include_str!("../../prompts/corruption.txt");
pub const CLASSIFICATION_PROMPT: &str = include_str!("../../prompts/classification.txt");
pub const FIGURE_DETECTION_PROMPT: &str = include_str!("../../prompts/figure_detection.txt");
pub const MTR_TEMPLATE: &str = include_str!("../../prompts/mtr.txt");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("no system prompt for language {0}")]
    MissingPrompt(String),
    #[error("prompt for {0} does not demand the reasoning/answer format")]
    MissingAnswerFormat(String),
}

/// Per-language system prompts. The user message is the problem image plus
/// its text.
#[derive(Clone, Debug)]
pub struct PromptCatalog {
    system: BTreeMap<String, String>,
}

impl Default for PromptCatalog {
    fn default() -> Self {
        Self::builtin()
    }
}

impl PromptCatalog {
    pub fn builtin() -> Self {
        let system = SYSTEM_PROMPTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        Self { system }
    }

    pub fn empty() -> Self {
        Self { system: BTreeMap::new() }
    }

    /// Add or replace the prompt of a language. The prompt must list the
    /// `A)`..`E)` answer strings.
    pub fn insert(&mut self, lang: &LanguageTag, prompt: impl Into<String>) -> Result<(), PromptError> {
        let prompt = prompt.into();
        if !demands_answer_format(&prompt) {
            return Err(PromptError::MissingAnswerFormat(lang.to_string()));
        }
        self.system.insert(lang.code().to_string(), prompt);
        Ok(())
    }

    pub fn system_prompt(&self, lang: &LanguageTag) -> Result<&str, PromptError> {
        self.system.get(lang.code()).map(String::as_str).ok_or_else(|| PromptError::MissingPrompt(lang.to_string()))
    }

    pub fn languages(&self) -> impl Iterator<Item = &str> {
        self.system.keys().map(String::as_str)
    }

    /// Fail unless every language in `langs` has a prompt.
    pub fn check_covers<'a>(&self, langs: impl IntoIterator<Item = &'a LanguageTag>) -> Result<(), PromptError> {
        for lang in langs {
            self.system_prompt(lang)?;
        }
        Ok(())
    }
}

fn demands_answer_format(prompt: &str) -> bool {
    ["A)", "B)", "C)", "D)", "E)"].iter().all(|s| prompt.contains(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_prompts_demand_format() {
        let cat = PromptCatalog::builtin();
        assert_eq!(cat.languages().count(), 13);
        for (code, text) in SYSTEM_PROMPTS {
            assert!(demands_answer_format(text), "{code}");
            assert!(!text.contains("\\\\"), "{code} carries markup");
        }
        let eng = cat.system_prompt(&LanguageTag::new("eng").unwrap()).unwrap();
        assert!(eng.contains("Reasoning:") && eng.contains("Answer: A), B), C), D) or E)"));
    }

    #[test]
    fn missing_language() {
        let cat = PromptCatalog::builtin();
        let zho = LanguageTag::new("zho").unwrap();
        assert_eq!(cat.system_prompt(&zho), Err(PromptError::MissingPrompt("zho".into())));
        assert!(cat.check_covers([&zho]).is_err());
    }

    #[test]
    fn insert_requires_format() {
        let mut cat = PromptCatalog::empty();
        let mlt = LanguageTag::new("mlt").unwrap();
        assert!(cat.insert(&mlt, "Wieġeb.").is_err());
        cat.insert(&mlt, "Tweġiba: A), B), C), D) jew E)").unwrap();
        assert!(cat.system_prompt(&mlt).is_ok());
    }

    #[test]
    fn corruption_prompt_demands_label_only() {
        assert!(CORRUPTION_PROMPT.contains("Return ONLY the label."));
    }
}
