use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::AnswerKey;

/// Parsed model answer: one of the option letters, or `N` for no answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParsedAnswer {
    A,
    B,
    C,
    D,
    E,
    N,
}

impl ParsedAnswer {
    pub fn key(self) -> Option<AnswerKey> {
        match self {
            ParsedAnswer::A => Some(AnswerKey::A),
            ParsedAnswer::B => Some(AnswerKey::B),
            ParsedAnswer::C => Some(AnswerKey::C),
            ParsedAnswer::D => Some(AnswerKey::D),
            ParsedAnswer::E => Some(AnswerKey::E),
            ParsedAnswer::N => None,
        }
    }

    pub fn is_none(self) -> bool {
        self == ParsedAnswer::N
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'N' => Some(ParsedAnswer::N),
            other => AnswerKey::from_letter(other).map(Self::from),
        }
    }
}

impl From<AnswerKey> for ParsedAnswer {
    fn from(k: AnswerKey) -> Self {
        match k {
            AnswerKey::A => ParsedAnswer::A,
            AnswerKey::B => ParsedAnswer::B,
            AnswerKey::C => ParsedAnswer::C,
            AnswerKey::D => ParsedAnswer::D,
            AnswerKey::E => ParsedAnswer::E,
        }
    }
}

impl fmt::Display for ParsedAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.key() {
            Some(k) => write!(f, "{k}"),
            None => f.write_str("N"),
        }
    }
}

/// Answer with the latest occurrence of `A)`..`E)` in the response, by byte
/// position; `N` when none occurs. Matching is case-sensitive ASCII.
pub fn parse_answer(response: &str) -> ParsedAnswer {
    let bytes = response.as_bytes();
    for i in (0..bytes.len().saturating_sub(1)).rev() {
        if bytes[i + 1] == b')' && (b'A'..=b'E').contains(&bytes[i]) {
            return ParsedAnswer::from_letter(bytes[i] as char).expect("A..=E");
        }
    }
    ParsedAnswer::N
}

/// Answer-like patterns the parser does not accept: lowercase `a)`..`e)` and
/// the full-width forms `Ａ)`..`Ｅ)` / `Ａ）`..`Ｅ）`, with their byte offsets.
pub fn near_misses(response: &str) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = response.char_indices().collect();
    for w in chars.windows(2) {
        let ((pos, a), (_, b)) = (w[0], w[1]);
        let close = b == ')' || b == '）';
        let letter = ('a'..='e').contains(&a) || ('Ａ'..='Ｅ').contains(&a) || (('A'..='E').contains(&a) && b == '）');
        if close && letter {
            out.push((pos, format!("{a}{b}")));
        }
    }
    out
}
