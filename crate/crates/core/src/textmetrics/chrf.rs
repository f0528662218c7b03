use serde::{Deserialize, Serialize};

use super::ngram::{char_ngrams, chrf_word_tokens, match_stats, word_ngrams};
use super::MetricScore;

/// chrF++ configuration. Defaults: character orders 1..=6, word orders 1..=2,
/// beta 2, whitespace excluded from character n-grams.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChrfParams {
    char_ngram_max: usize,
    word_ngram_max: usize,
    beta: f64,
    include_whitespace: bool,
}

impl Default for ChrfParams {
    fn default() -> Self {
        Self { char_ngram_max: 6, word_ngram_max: 2, beta: 2.0, include_whitespace: false }
    }
}

impl ChrfParams {
    pub fn new(char_ngram_max: usize, word_ngram_max: usize, beta: f64) -> Result<Self, String> {
        if char_ngram_max < 1 {
            return Err("char_ngram_max must be >= 1".into());
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(format!("beta must be positive and finite, got {beta}"));
        }
        Ok(Self { char_ngram_max, word_ngram_max, beta, include_whitespace: false })
    }

    /// Plain chrF: character n-grams only.
    pub fn chrf() -> Self {
        Self { word_ngram_max: 0, ..Self::default() }
    }

    /// Keep whitespace (collapsed to single spaces) inside character n-grams.
    pub fn with_whitespace(mut self, include: bool) -> Self {
        self.include_whitespace = include;
        self
    }

    pub fn char_ngram_max(&self) -> usize {
        self.char_ngram_max
    }

    pub fn word_ngram_max(&self) -> usize {
        self.word_ngram_max
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn include_whitespace(&self) -> bool {
        self.include_whitespace
    }
}

/// Per-order `(hypothesis, reference, matched)` n-gram counts; character
/// orders first, then word orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChrfStatistics {
    pub orders: Vec<(usize, usize, usize)>,
}

impl ChrfStatistics {
    pub fn collect(reference: &str, hypothesis: &str, params: &ChrfParams) -> Self {
        let prep = |s: &str| -> Vec<char> {
            if params.include_whitespace {
                s.split_whitespace().collect::<Vec<_>>().join(" ").chars().collect()
            } else {
                s.chars().filter(|c| !c.is_whitespace()).collect()
            }
        };
        let ref_chars = prep(reference);
        let hyp_chars = prep(hypothesis);
        let mut orders = Vec::with_capacity(params.char_ngram_max + params.word_ngram_max);
        for n in 1..=params.char_ngram_max {
            orders.push(match_stats(&char_ngrams(&hyp_chars, n), &char_ngrams(&ref_chars, n)));
        }
        let ref_words = chrf_word_tokens(reference);
        let hyp_words = chrf_word_tokens(hypothesis);
        for n in 1..=params.word_ngram_max {
            orders.push(match_stats(&word_ngrams(&hyp_words, n), &word_ngrams(&ref_words, n)));
        }
        Self { orders }
    }

    /// Average precision and recall over orders where both sides have
    /// n-grams, then combine them into F-beta.
    pub fn f_score(&self, beta: f64) -> f64 {
        let factor = beta * beta;
        let (mut prec_sum, mut rec_sum, mut effective) = (0.0, 0.0, 0usize);
        for &(hyp, reference, matched) in &self.orders {
            if hyp > 0 && reference > 0 {
                prec_sum += matched as f64 / hyp as f64;
                rec_sum += matched as f64 / reference as f64;
                effective += 1;
            }
        }
        if effective == 0 {
            return 0.0;
        }
        let prec = prec_sum / effective as f64;
        let rec = rec_sum / effective as f64;
        if prec + rec == 0.0 {
            return 0.0;
        }
        (1.0 + factor) * prec * rec / (factor * prec + rec)
    }
}

/// Sentence-level chrF++ of `hypothesis` against `reference`. Not symmetric.
pub fn chrf_pp(reference: &str, hypothesis: &str, params: &ChrfParams) -> MetricScore {
    let hyp_len = hypothesis.chars().count();
    let ref_len = reference.chars().count();
    let name = if params.word_ngram_max > 0 { "chrf++" } else { "chrf" };
    if reference.trim().is_empty() && hypothesis.trim().is_empty() {
        return MetricScore::new(name, 1.0, hyp_len, ref_len);
    }
    let value = ChrfStatistics::collect(reference, hypothesis, params).f_score(params.beta);
    MetricScore::new(name, value, hyp_len, ref_len)
}
