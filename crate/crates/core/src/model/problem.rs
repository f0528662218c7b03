use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LanguageTag, ModelError};

/// Option label of a multiple-choice problem. Labels are Latin letters in
/// every language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnswerKey {
    A,
    B,
    C,
    D,
    E,
}

impl AnswerKey {
    pub const ALL: [AnswerKey; 5] = [AnswerKey::A, AnswerKey::B, AnswerKey::C, AnswerKey::D, AnswerKey::E];

    pub fn letter(self) -> char {
        match self {
            AnswerKey::A => 'A',
            AnswerKey::B => 'B',
            AnswerKey::C => 'C',
            AnswerKey::D => 'D',
            AnswerKey::E => 'E',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'A' => Some(AnswerKey::A),
            'B' => Some(AnswerKey::B),
            'C' => Some(AnswerKey::C),
            'D' => Some(AnswerKey::D),
            'E' => Some(AnswerKey::E),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for AnswerKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for AnswerKey {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => AnswerKey::from_letter(c).ok_or_else(|| ModelError::InvalidAnswerKey(s.to_string())),
            _ => Err(ModelError::InvalidAnswerKey(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    Algebra,
    Arithmetic,
    CombinatoricsProbability,
    Geometry,
    Logic,
}

impl FromStr for Category {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "algebra" => Ok(Category::Algebra),
            "arithmetic" => Ok(Category::Arithmetic),
            "combinatorics-probability" | "combinatorics & probability" => Ok(Category::CombinatoricsProbability),
            "geometry" => Ok(Category::Geometry),
            "logic" => Ok(Category::Logic),
            _ => Err(ModelError::InvalidCategory(s.to_string())),
        }
    }
}

/// Pixel rectangle of the question-text region inside a problem image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl BBox {
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> u64 {
        self.x as u64 + self.w as u64
    }

    pub fn bottom(&self) -> u64 {
        self.y as u64 + self.h as u64
    }

    /// True when the box lies inside an image of the given size.
    pub fn fits_within(&self, width: u32, height: u32) -> bool {
        self.right() <= width as u64 && self.bottom() <= height as u64
    }

    pub fn contains(&self, px: u32, py: u32) -> bool {
        px >= self.x && (px as u64) < self.right() && py >= self.y && (py as u64) < self.bottom()
    }
}

/// One multiple-choice problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemRecord {
    pub id: String,
    pub year: i32,
    pub level: u8,
    pub number: u32,
    pub question_text: String,
    pub options: [String; 5],
    pub answer_key: AnswerKey,
    pub image_ref: String,
    pub bbox: BBox,
    pub has_figure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<Category>,
}

impl ProblemRecord {
    pub const MAX_LEVEL: u8 = 7;

    /// Check the field invariants that do not depend on the image file.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.id.is_empty() {
            return Err(ModelError::invalid_field("id", "must be non-empty"));
        }
        if self.level > Self::MAX_LEVEL {
            return Err(ModelError::invalid_field("level", format!("{} outside 0..=7", self.level)));
        }
        if self.number == 0 {
            return Err(ModelError::invalid_field("number", "must be >= 1"));
        }
        Ok(())
    }

    /// Ordering key used when choosing which of two duplicates survives:
    /// lowest level, then lowest year, then lowest number, then id.
    pub fn seniority(&self) -> (u8, i32, u32, &str) {
        (self.level, self.year, self.number, self.id.as_str())
    }
}

/// A source text and its machine translation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationRecord {
    pub problem_id: String,
    pub source_lang: LanguageTag,
    pub target_lang: LanguageTag,
    pub source_text: String,
    pub target_text: String,
    pub translator_id: String,
}

impl TranslationRecord {
    pub fn new(
        problem_id: impl Into<String>,
        source_lang: LanguageTag,
        target_lang: LanguageTag,
        source_text: impl Into<String>,
        target_text: impl Into<String>,
        translator_id: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let rec = Self {
            problem_id: problem_id.into(),
            source_lang,
            target_lang,
            source_text: source_text.into(),
            target_text: target_text.into(),
            translator_id: translator_id.into(),
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.source_text.is_empty() {
            return Err(ModelError::invalid_field("source_text", "must be non-empty"));
        }
        if self.source_lang == self.target_lang {
            return Err(ModelError::invalid_field(
                "target_lang",
                format!("equals source language {}", self.source_lang),
            ));
        }
        Ok(())
    }
}
