use crate::eval::ParsedAnswer;

/// Default pivot order for cross-lingual self-consistent prompting; English
/// first so it wins ties.
pub const DEFAULT_PIVOTS: [&str; 4] = ["eng", "spa", "deu", "fra"];

/// Majority vote over per-pivot answers given in pivot priority order.
///
/// `N` answers abstain unless every path abstains. Ties go to the tied answer
/// that appears first in the list.
pub fn clsp_vote(answers: &[ParsedAnswer]) -> ParsedAnswer {
    let mut counts = [0usize; 5];
    for a in answers {
        if let Some(k) = a.key() {
            counts[k.index()] += 1;
        }
    }
    let best = counts.iter().copied().max().unwrap_or(0);
    if best == 0 {
        return ParsedAnswer::N;
    }
    answers
        .iter()
        .copied()
        .find(|a| a.key().is_some_and(|k| counts[k.index()] == best))
        .expect("a key with the maximal count exists")
}
