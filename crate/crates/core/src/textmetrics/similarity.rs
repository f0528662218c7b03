use std::collections::HashSet;

use super::ngram::normalize_text;

/// Character-trigram Jaccard similarity after NFC normalization and
/// whitespace collapsing. Symmetric; identical inputs score 1.
///
/// Texts shorter than three characters contribute the whole text as their
/// only gram.
pub fn text_similarity(a: &str, b: &str) -> f64 {
    let a = normalize_text(a);
    let b = normalize_text(b);
    if a == b {
        return 1.0;
    }
    let ga = trigrams(&a);
    let gb = trigrams(&b);
    jaccard(&ga, &gb)
}

/// Precomputed trigram set of one text, for comparing it against many others.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigramProfile {
    normalized: String,
    grams: HashSet<String>,
}

impl TrigramProfile {
    pub fn new(text: &str) -> Self {
        let normalized = normalize_text(text);
        let grams = trigrams(&normalized);
        Self { normalized, grams }
    }

    /// Same value as [`text_similarity`] on the two source texts.
    pub fn similarity(&self, other: &Self) -> f64 {
        if self.normalized == other.normalized {
            return 1.0;
        }
        jaccard(&self.grams, &other.grams)
    }
}

fn trigrams(normalized: &str) -> HashSet<String> {
    let chars: Vec<char> = normalized.chars().collect();
    if chars.is_empty() {
        return HashSet::new();
    }
    if chars.len() < 3 {
        return HashSet::from([normalized.to_string()]);
    }
    chars.windows(3).map(|w| w.iter().collect()).collect()
}

fn jaccard(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(b).count() as f64 / union as f64
}
