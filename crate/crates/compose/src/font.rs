use std::fs;
use std::path::Path;

use ab_glyph::{Font, FontArc, GlyphId, PxScale, ScaleFont};

use crate::ComposeError;

/// DejaVu Sans, bundled so output is byte-stable across machines.
pub static PINNED_FONT: &[u8] = include_bytes!("../assets/DejaVuSans.ttf");

/// Measures rendered text. Widths must not decrease when the font size grows
/// or when characters are appended.
pub trait GlyphMeasurer {
    /// `(width, height)` in pixels of `text` set at `font_size`.
    fn measure(&self, text: &str, font_size: f32) -> (f32, f32);
}

/// Every character is one unit wide and one font size tall; useful for
/// reasoning about layouts by hand.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitMeasurer;

impl GlyphMeasurer for UnitMeasurer {
    fn measure(&self, text: &str, font_size: f32) -> (f32, f32) {
        (text.chars().count() as f32, font_size)
    }
}

/// Ordered font fallback: each character uses the first font that has a
/// glyph for it, or the first font's missing-glyph box.
///
/// Font size is pixels per em.
#[derive(Clone)]
pub struct FontStack {
    fonts: Vec<FontArc>,
}

impl std::fmt::Debug for FontStack {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FontStack").field("fonts", &self.fonts.len()).finish()
    }
}

impl FontStack {
    pub fn new(fonts: Vec<FontArc>) -> Result<Self, ComposeError> {
        if fonts.is_empty() {
            return Err(ComposeError::Font("font stack is empty".into()));
        }
        Ok(Self { fonts })
    }

    /// Stack holding only the bundled font.
    pub fn pinned() -> Self {
        let font = FontArc::try_from_slice(PINNED_FONT).expect("bundled font parses");
        Self { fonts: vec![font] }
    }

    /// Load every `.ttf`/`.otf` in `dir`, in file-name order, followed by the
    /// bundled font as last resort.
    pub fn from_dir(dir: &Path) -> Result<Self, ComposeError> {
        let err = |e: std::io::Error| ComposeError::Font(format!("{}: {e}", dir.display()));
        let mut paths: Vec<_> = fs::read_dir(dir)
            .map_err(err)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("ttf") || e.eq_ignore_ascii_case("otf"))
            })
            .collect();
        paths.sort();
        let mut fonts = Vec::with_capacity(paths.len() + 1);
        for p in paths {
            let bytes = fs::read(&p).map_err(err)?;
            let font = FontArc::try_from_vec(bytes).map_err(|e| ComposeError::Font(format!("{}: {e}", p.display())))?;
            fonts.push(font);
        }
        fonts.extend(Self::pinned().fonts);
        Ok(Self { fonts })
    }

    /// Index into the stack and glyph id for `c`.
    pub(crate) fn pick(&self, c: char) -> (usize, GlyphId) {
        self.fonts
            .iter()
            .enumerate()
            .find_map(|(i, f)| {
                let id = f.glyph_id(c);
                (id.0 != 0).then_some((i, id))
            })
            .unwrap_or((0, self.fonts[0].glyph_id(c)))
    }

    pub(crate) fn font(&self, index: usize) -> &FontArc {
        &self.fonts[index]
    }

    pub(crate) fn scale(font: &FontArc, font_size: f32) -> PxScale {
        let upem = font.units_per_em().unwrap_or(1000.0);
        PxScale::from(font_size * font.height_unscaled() / upem)
    }

    /// Ascent of the primary font at `font_size`.
    pub(crate) fn ascent(&self, font_size: f32) -> f32 {
        let f = &self.fonts[0];
        f.as_scaled(Self::scale(f, font_size)).ascent()
    }

    /// Pen advance of each character, with kerning between neighbours set
    /// in the same font folded into the left glyph's advance.
    pub(crate) fn advances(&self, text: &str, font_size: f32) -> Vec<(char, usize, GlyphId, f32)> {
        let mut out: Vec<(char, usize, GlyphId, f32)> = Vec::new();
        for c in text.chars() {
            let (fi, id) = self.pick(c);
            let font = &self.fonts[fi];
            let scaled = font.as_scaled(Self::scale(font, font_size));
            if let Some((_, pfi, pid, adv)) = out.last_mut() {
                if *pfi == fi {
                    *adv += scaled.kern(*pid, id);
                }
            }
            out.push((c, fi, id, scaled.h_advance(id)));
        }
        out
    }
}

impl GlyphMeasurer for FontStack {
    fn measure(&self, text: &str, font_size: f32) -> (f32, f32) {
        let width = self.advances(text, font_size).iter().map(|g| g.3).sum::<f32>().max(0.0);
        let f = &self.fonts[0];
        let scaled = f.as_scaled(Self::scale(f, font_size));
        (width, scaled.ascent() - scaled.descent())
    }
}
