use super::ngram::{match_stats, whitespace_tokens, word_ngrams};
use super::MetricScore;

pub const DEFAULT_BLEU_ORDER: usize = 4;

/// Sentence BLEU over whitespace tokens without smoothing.
///
/// Orders longer than the hypothesis are skipped (effective order), so an
/// exact match scores 1 at any length. Any included order with zero matches
/// gives 0.
pub fn bleu(reference: &str, hypothesis: &str, max_order: usize) -> MetricScore {
    let max_order = max_order.max(1);
    let ref_tok = whitespace_tokens(reference);
    let hyp_tok = whitespace_tokens(hypothesis);
    let (c, r) = (hyp_tok.len(), ref_tok.len());
    let score = |v| MetricScore::new("bleu", v, c, r);
    if c == 0 && r == 0 {
        return score(1.0);
    }
    if c == 0 || r == 0 {
        return score(0.0);
    }
    let mut log_sum = 0.0;
    let mut orders = 0usize;
    for n in 1..=max_order.min(c) {
        let (hyp_total, _, matched) = match_stats(&word_ngrams(&hyp_tok, n), &word_ngrams(&ref_tok, n));
        if matched == 0 {
            return score(0.0);
        }
        log_sum += (matched as f64 / hyp_total as f64).ln();
        orders += 1;
    }
    let precision = (log_sum / orders as f64).exp();
    let bp = if c > r { 1.0 } else { (1.0 - r as f64 / c as f64).exp() };
    score((bp * precision).min(1.0))
}
