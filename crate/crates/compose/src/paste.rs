use std::path::Path;

use ab_glyph::{point, Font};
use forge_core::model::BBox;
use image::{Rgba, RgbaImage};
use unicode_bidi::BidiInfo;

use crate::{wrap_text, ComposeError, FontStack, TextLayout, WrapConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PasteOptions {
    pub color: Rgba<u8>,
}

impl Default for PasteOptions {
    fn default() -> Self {
        Self { color: Rgba([0, 0, 0, 255]) }
    }
}

/// Clear `bbox` to the colour of its top-left pixel and render `layout`
/// inside it, left-aligned from the top. Pixels outside `bbox` are never
/// touched; glyph parts crossing its edge are clipped.
pub fn paste_text(
    image: &RgbaImage,
    bbox: BBox,
    layout: &TextLayout,
    fonts: &FontStack,
    opts: &PasteOptions,
) -> Result<RgbaImage, ComposeError> {
    if !layout.fits {
        return Err(ComposeError::LayoutDoesNotFit);
    }
    if bbox.w == 0 || bbox.h == 0 {
        return Err(ComposeError::EmptyBox);
    }
    let (width, height) = image.dimensions();
    if !bbox.fits_within(width, height) {
        return Err(ComposeError::BoxOutsideImage { bbox, width, height });
    }
    let mut out = image.clone();
    let background = *image.get_pixel(bbox.x, bbox.y);
    for y in bbox.y..bbox.y + bbox.h {
        for x in bbox.x..bbox.x + bbox.w {
            out.put_pixel(x, y, background);
        }
    }

    let ascent = fonts.ascent(layout.font_size);
    for (i, line) in layout.lines.iter().enumerate() {
        let baseline = bbox.y as f32 + i as f32 * layout.line_height + ascent;
        let mut pen = bbox.x as f32;
        for (_, fi, id, advance) in fonts.advances(&visual_order(line), layout.font_size) {
            let font = fonts.font(fi);
            let glyph = id.with_scale_and_position(FontStack::scale(font, layout.font_size), point(pen, baseline));
            pen += advance;
            let Some(outlined) = font.outline_glyph(glyph) else { continue };
            let bounds = outlined.px_bounds();
            outlined.draw(|gx, gy, coverage| {
                let px = bounds.min.x as i64 + i64::from(gx);
                let py = bounds.min.y as i64 + i64::from(gy);
                let (Ok(px), Ok(py)) = (u32::try_from(px), u32::try_from(py)) else { return };
                if bbox.contains(px, py) {
                    let dst = out.get_pixel_mut(px, py);
                    *dst = blend(*dst, opts.color, coverage);
                }
            });
        }
    }
    Ok(out)
}

fn blend(under: Rgba<u8>, over: Rgba<u8>, coverage: f32) -> Rgba<u8> {
    let a = coverage.clamp(0.0, 1.0) * f32::from(over.0[3]) / 255.0;
    let mix = |u: u8, o: u8| (f32::from(u) * (1.0 - a) + f32::from(o) * a).round() as u8;
    Rgba([
        mix(under.0[0], over.0[0]),
        mix(under.0[1], over.0[1]),
        mix(under.0[2], over.0[2]),
        under.0[3].max(over.0[3]),
    ])
}

/// Reorder a logical-order line for display when it holds right-to-left text.
fn visual_order(line: &str) -> String {
    let info = BidiInfo::new(line, None);
    if !info.has_rtl() {
        return line.to_string();
    }
    info.paragraphs.iter().map(|p| info.reorder_line(p, p.range.clone())).collect()
}

/// Wrap `text` into `bbox` of the PNG at `input` and write the result to
/// `output`.
pub fn compose_file(
    input: &Path,
    output: &Path,
    bbox: BBox,
    text: &str,
    fonts: &FontStack,
    cfg: &WrapConfig,
    opts: &PasteOptions,
) -> Result<TextLayout, ComposeError> {
    let render = |e: image::ImageError| ComposeError::RenderFailure(e.to_string());
    let image = image::open(input).map_err(render)?.to_rgba8();
    let layout = wrap_text(text, (bbox.w, bbox.h), fonts, cfg)?;
    let out = paste_text(&image, bbox, &layout, fonts, opts)?;
    out.save_with_format(output, image::ImageFormat::Png).map_err(render)?;
    Ok(layout)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn latin_is_left_alone() {
        assert_eq!(visual_order("abc def"), "abc def");
    }

    #[test]
    fn hebrew_is_reversed() {
        assert_eq!(visual_order("\u{5d0}\u{5d1}\u{5d2}"), "\u{5d2}\u{5d1}\u{5d0}");
    }

    #[test]
    fn blend_extremes() {
        let w = Rgba([255, 255, 255, 255]);
        let b = Rgba([0, 0, 0, 255]);
        assert_eq!(blend(w, b, 0.0), w);
        assert_eq!(blend(w, b, 1.0), b);
    }
}
