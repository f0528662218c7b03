use std::collections::HashMap;
use std::hash::Hash;

use unicode_normalization::UnicodeNormalization;

/// ASCII punctuation split off word edges for chrF++ word n-grams.
const PUNCT: &str = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

fn is_punct(c: char) -> bool {
    PUNCT.contains(c)
}

pub fn whitespace_tokens(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}

/// Whitespace tokens with one leading or trailing punctuation character split
/// off as its own token (trailing takes precedence).
pub fn chrf_word_tokens(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for w in s.split_whitespace() {
        let mut chars = w.chars();
        let first = chars.next().expect("split_whitespace yields non-empty tokens");
        let Some(last) = w.chars().next_back() else { continue };
        if w.chars().count() == 1 {
            out.push(w);
        } else if is_punct(last) {
            let cut = w.len() - last.len_utf8();
            out.push(&w[..cut]);
            out.push(&w[cut..]);
        } else if is_punct(first) {
            let cut = first.len_utf8();
            out.push(&w[..cut]);
            out.push(&w[cut..]);
        } else {
            out.push(w);
        }
    }
    out
}

/// NFC normalization followed by collapsing whitespace runs to single spaces.
pub fn normalize_text(s: &str) -> String {
    let nfc: String = s.nfc().collect();
    nfc.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub(crate) fn count<T: Eq + Hash>(items: impl IntoIterator<Item = T>) -> HashMap<T, usize> {
    let mut m = HashMap::new();
    for it in items {
        *m.entry(it).or_insert(0) += 1;
    }
    m
}

/// Character n-grams of order `n` as slices of `chars`.
pub(crate) fn char_ngrams(chars: &[char], n: usize) -> HashMap<&[char], usize> {
    if n == 0 || chars.len() < n {
        return HashMap::new();
    }
    count(chars.windows(n))
}

pub(crate) fn word_ngrams<'a>(tokens: &'a [&'a str], n: usize) -> HashMap<&'a [&'a str], usize> {
    if n == 0 || tokens.len() < n {
        return HashMap::new();
    }
    count(tokens.windows(n))
}

/// Returns (hypothesis total, reference total, clipped matches).
pub(crate) fn match_stats<K: Eq + Hash>(
    hyp: &HashMap<K, usize>,
    reference: &HashMap<K, usize>,
) -> (usize, usize, usize) {
    let hyp_total = hyp.values().sum();
    let ref_total = reference.values().sum();
    let matches = hyp.iter().map(|(k, &c)| reference.get(k).map_or(0, |&r| r.min(c))).sum();
    (hyp_total, ref_total, matches)
}
