use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

/// Internet resource tier of a language, derived from its share of web content.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceClass {
    High,
    Mid,
    Low,
}

impl ResourceClass {
    pub const ALL: [ResourceClass; 3] = [ResourceClass::High, ResourceClass::Mid, ResourceClass::Low];
}

impl fmt::Display for ResourceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ResourceClass::High => "high",
            ResourceClass::Mid => "mid",
            ResourceClass::Low => "low",
        };
        f.write_str(s)
    }
}

/// Classify a web-presence percentage.
///
/// Intervals are closed on the lower bound: `[1, 100]` is High, `[0.1, 1)` is
/// Mid and `[0, 0.1)` is Low.
pub fn classify_resource(presence_percent: f64) -> Result<ResourceClass, ModelError> {
    if presence_percent.is_nan() || presence_percent < 0.0 {
        return Err(ModelError::NegativePresence(presence_percent));
    }
    Ok(if presence_percent >= 1.0 {
        ResourceClass::High
    } else if presence_percent >= 0.1 {
        ResourceClass::Mid
    } else {
        ResourceClass::Low
    })
}

/// Web-presence percentages of the evaluation languages.
pub const KNOWN_PRESENCE: &[(&str, &str, f64)] = &[
    ("eng", "English", 49.2),
    ("spa", "Spanish", 6.00),
    ("deu", "German", 5.90),
    ("fra", "French", 4.40),
    ("tur", "Turkish", 1.70),
    ("zho", "Chinese", 1.1),
    ("vie", "Vietnamese", 1.03),
    ("ind", "Indonesian", 0.982),
    ("lit", "Lithuanian", 0.173),
    ("cat", "Catalan", 0.102),
    ("est", "Estonian", 0.101),
    ("afr", "Afrikaans", 2.50e-3),
    ("swh", "Swahili", 1.70e-3),
    ("mlt", "Maltese", 4.30e-4),
    ("lin", "Lingala", 1.60e-5),
    ("tso", "Tsonga", 6.00e-6),
];

/// Look up the recorded web-presence percentage for a language code.
pub fn known_presence(code: &str) -> Option<f64> {
    KNOWN_PRESENCE.iter().find(|(c, _, _)| *c == code).map(|(_, _, p)| *p)
}

/// ISO-639-3 style language code, with the resource tier when the web
/// presence of the language is known.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LanguageTag {
    code: String,
    resource_class: Option<ResourceClass>,
}

impl LanguageTag {
    /// Parse a code, attaching the resource class from [`KNOWN_PRESENCE`].
    pub fn new(code: impl Into<String>) -> Result<Self, ModelError> {
        let code = code.into();
        if code.is_empty() || !code.bytes().all(|b| b.is_ascii_lowercase()) {
            return Err(ModelError::InvalidLanguageCode(code));
        }
        let resource_class =
            known_presence(&code).map(|p| classify_resource(p).expect("table values are non-negative"));
        Ok(Self { code, resource_class })
    }

    /// Build a tag with an explicit web-presence share.
    pub fn with_presence(code: impl Into<String>, presence_percent: f64) -> Result<Self, ModelError> {
        let mut tag = Self::new(code)?;
        tag.resource_class = Some(classify_resource(presence_percent)?);
        Ok(tag)
    }

    pub fn code(&self) -> &str {
        &self.code
    }

    pub fn resource_class(&self) -> Option<ResourceClass> {
        self.resource_class
    }

    pub fn is_english(&self) -> bool {
        self.code == "eng"
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code)
    }
}

impl FromStr for LanguageTag {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s.trim())
    }
}

impl Serialize for LanguageTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.code)
    }
}

impl<'de> Deserialize<'de> for LanguageTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        LanguageTag::new(s).map_err(serde::de::Error::custom)
    }
}
