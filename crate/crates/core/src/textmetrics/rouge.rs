use serde::{Deserialize, Serialize};

use super::ngram::{count, match_stats, whitespace_tokens};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rouge1 {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Unigram overlap with clipped counts, over whitespace tokens.
pub fn rouge1(reference: &str, hypothesis: &str) -> Rouge1 {
    let ref_tok = whitespace_tokens(reference);
    let hyp_tok = whitespace_tokens(hypothesis);
    if ref_tok.is_empty() && hyp_tok.is_empty() {
        return Rouge1 { precision: 1.0, recall: 1.0, f1: 1.0 };
    }
    let (hyp_total, ref_total, overlap) = match_stats(&count(hyp_tok), &count(ref_tok));
    let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let precision = ratio(overlap, hyp_total);
    let recall = ratio(overlap, ref_total);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Rouge1 { precision, recall, f1 }
}
