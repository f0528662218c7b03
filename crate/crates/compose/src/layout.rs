use forge_core::textmetrics::normalize_text;

use crate::{ComposeError, GlyphMeasurer};

/// Font search and spacing settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WrapConfig {
    pub initial_font: f32,
    pub min_font: f32,
    /// Line pitch as a multiple of the font size.
    pub line_spacing: f32,
    pub step: f32,
}

impl Default for WrapConfig {
    fn default() -> Self {
        Self { initial_font: 16.0, min_font: 6.0, line_spacing: 1.2, step: 0.5 }
    }
}

impl WrapConfig {
    fn validate(&self) -> Result<(), ComposeError> {
        let ok = self.min_font > 0.0
            && self.initial_font >= self.min_font
            && self.step > 0.0
            && self.line_spacing > 0.0
            && [self.initial_font, self.min_font, self.step, self.line_spacing].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(ComposeError::InvalidConfig(format!("{self:?}")))
        }
    }

    /// Candidate sizes from `initial_font` down to `min_font`.
    fn sizes(&self) -> impl Iterator<Item = f32> + '_ {
        let steps = ((self.initial_font - self.min_font) / self.step).floor() as usize;
        (0..=steps).map(move |k| self.initial_font - k as f32 * self.step)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TextLayout {
    pub lines: Vec<String>,
    pub font_size: f32,
    pub line_height: f32,
    pub fits: bool,
}

impl TextLayout {
    pub fn height(&self) -> f32 {
        self.lines.len() as f32 * self.line_height
    }
}

/// Greedy first-fit wrap of `text` into a `(width, height)` box, shrinking
/// the font until everything fits. Words are never split: a word wider than
/// the box at `min_font` gets its own line and `fits` is false.
pub fn wrap_text(
    text: &str,
    bbox: (u32, u32),
    measurer: &dyn GlyphMeasurer,
    cfg: &WrapConfig,
) -> Result<TextLayout, ComposeError> {
    let (w, h) = bbox;
    if w == 0 || h == 0 {
        return Err(ComposeError::EmptyBox);
    }
    cfg.validate()?;
    let normalized = normalize_text(text);
    let words: Vec<&str> = normalized.split(' ').filter(|s| !s.is_empty()).collect();
    let (w, h) = (w as f32, h as f32);
    let mut last = None;
    for size in cfg.sizes() {
        let lines = greedy(&words, w, size, measurer);
        let line_height = size * cfg.line_spacing;
        let fits = lines.iter().all(|l| measurer.measure(l, size).0 <= w) && lines.len() as f32 * line_height <= h;
        let layout = TextLayout { lines, font_size: size, line_height, fits };
        if fits {
            return Ok(layout);
        }
        last = Some(layout);
    }
    Ok(last.expect("at least one candidate size"))
}

fn greedy(words: &[&str], width: f32, size: f32, measurer: &dyn GlyphMeasurer) -> Vec<String> {
    let mut lines = Vec::new();
    let mut current = String::new();
    for word in words {
        if current.is_empty() {
            current.push_str(word);
            continue;
        }
        let candidate = format!("{current} {word}");
        if measurer.measure(&candidate, size).0 <= width {
            current = candidate;
        } else {
            lines.push(std::mem::replace(&mut current, (*word).to_string()));
        }
    }
    if !current.is_empty() {
        lines.push(current);
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::UnitMeasurer;

    fn cfg() -> WrapConfig {
        WrapConfig { initial_font: 10.0, min_font: 6.0, line_spacing: 1.0, step: 0.5 }
    }

    #[test]
    fn short_text_single_line() {
        let l = wrap_text("hello", (100, 100), &UnitMeasurer, &cfg()).unwrap();
        assert_eq!(l.lines, vec!["hello"]);
        assert_eq!(l.font_size, 10.0);
        assert!(l.fits);
    }

    #[test]
    fn two_token_box() {
        // "aa bb" is five units wide; "aa bb cc" would be eight.
        let l = wrap_text("aa bb cc", (5, 20), &UnitMeasurer, &cfg()).unwrap();
        assert_eq!(l.lines, vec!["aa bb", "cc"]);
        assert!(l.fits);
    }

    #[test]
    fn shrinks_until_height_fits() {
        // Two lines need 2 * size <= 15, first true at 7.5.
        let l = wrap_text("aa bb cc", (5, 15), &UnitMeasurer, &cfg()).unwrap();
        assert_eq!(l.font_size, 7.5);
        assert!(l.fits);
    }

    #[test]
    fn unbreakable_token_overflows() {
        let l = wrap_text("a supercalifragilistic word", (8, 100), &UnitMeasurer, &cfg()).unwrap();
        assert!(!l.fits);
        assert_eq!(l.font_size, 6.0);
        assert_eq!(l.lines, vec!["a", "supercalifragilistic", "word"]);
    }

    #[test]
    fn errors() {
        assert!(matches!(wrap_text("x", (0, 5), &UnitMeasurer, &cfg()), Err(ComposeError::EmptyBox)));
        let bad = WrapConfig { min_font: 12.0, ..cfg() };
        assert!(matches!(wrap_text("x", (5, 5), &UnitMeasurer, &bad), Err(ComposeError::InvalidConfig(_))));
    }

    #[test]
    fn empty_text_fits() {
        let l = wrap_text("   ", (5, 5), &UnitMeasurer, &cfg()).unwrap();
        assert!(l.lines.is_empty() && l.fits);
    }
}
