use crate::eval::MTR_TEMPLATE;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MtrError {
    #[error("{0} text is empty")]
    EmptyText(&'static str),
    #[error("template must contain {{original}} followed by {{english}}")]
    BadTemplate,
    #[error("{0} text contains the template separator")]
    EmbeddedDelimiter(&'static str),
    #[error("prompt does not match the template")]
    NoMatch,
}

/// Two-block prompt holding a question and its English translation, original
/// first. The image attachment is sent unchanged alongside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MtrTemplate {
    prefix: String,
    middle: String,
    suffix: String,
}

impl Default for MtrTemplate {
    fn default() -> Self {
        Self::parse(MTR_TEMPLATE).expect("bundled template is valid")
    }
}

impl MtrTemplate {
    pub fn parse(template: &str) -> Result<Self, MtrError> {
        let (prefix, rest) = template.split_once("{original}").ok_or(MtrError::BadTemplate)?;
        let (middle, suffix) = rest.split_once("{english}").ok_or(MtrError::BadTemplate)?;
        if middle.is_empty() {
            return Err(MtrError::BadTemplate);
        }
        Ok(Self { prefix: prefix.into(), middle: middle.into(), suffix: suffix.into() })
    }

    pub fn render(&self, original: &str, english: &str) -> Result<String, MtrError> {
        if original.trim().is_empty() {
            return Err(MtrError::EmptyText("original"));
        }
        if english.trim().is_empty() {
            return Err(MtrError::EmptyText("english"));
        }
        if original.contains(&self.middle) {
            return Err(MtrError::EmbeddedDelimiter("original"));
        }
        if english.contains(&self.middle) {
            return Err(MtrError::EmbeddedDelimiter("english"));
        }
        Ok(format!("{}{}{}{}{}", self.prefix, original, self.middle, english, self.suffix))
    }

    /// Recover `(original, english)` from a rendered prompt.
    pub fn extract<'a>(&self, prompt: &'a str) -> Result<(&'a str, &'a str), MtrError> {
        let body = prompt
            .strip_prefix(self.prefix.as_str())
            .and_then(|s| s.strip_suffix(self.suffix.as_str()))
            .ok_or(MtrError::NoMatch)?;
        body.split_once(self.middle.as_str()).ok_or(MtrError::NoMatch)
    }
}

pub fn mtr_prompt(original: &str, english: &str, template: &MtrTemplate) -> Result<String, MtrError> {
    template.render(original, english)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn original_first() {
        let t = MtrTemplate::default();
        let p = mtr_prompt("Quants quadrats?", "How many squares?", &t).unwrap();
        let i = p.find("Quants quadrats?").unwrap();
        let j = p.find("How many squares?").unwrap();
        assert!(i < j);
        assert_eq!(t.extract(&p).unwrap(), ("Quants quadrats?", "How many squares?"));
    }

    #[test]
    fn english_original_still_two_blocks() {
        let t = MtrTemplate::default();
        let p = mtr_prompt("How many?", "How many?", &t).unwrap();
        assert_eq!(p.matches("How many?").count(), 2);
    }

    #[test]
    fn errors() {
        let t = MtrTemplate::default();
        assert_eq!(mtr_prompt("", "x", &t), Err(MtrError::EmptyText("original")));
        assert_eq!(mtr_prompt("x", " ", &t), Err(MtrError::EmptyText("english")));
        assert_eq!(MtrTemplate::parse("{english} {original}"), Err(MtrError::BadTemplate));
        assert_eq!(t.extract("unrelated"), Err(MtrError::NoMatch));
    }
}
