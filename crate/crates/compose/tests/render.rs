use forge_compose::{compose_file, paste_text, wrap_text, FontStack, GlyphMeasurer, PasteOptions, WrapConfig};
use forge_core::model::BBox;
use image::{Rgba, RgbaImage};
use sha2::{Digest, Sha256};

const GOLDEN_TEXT: &str = "Wie viele Dreiecke sind in der Abbildung zu sehen? Größe zählt nicht.";

fn golden_canvas() -> (RgbaImage, BBox) {
    let mut img = RgbaImage::from_fn(240, 140, |x, y| Rgba([(x % 256) as u8, (y * 2 % 256) as u8, 128, 255]));
    let bbox = BBox::new(20, 30, 180, 64);
    for y in bbox.y..bbox.y + bbox.h {
        for x in bbox.x..bbox.x + bbox.w {
            img.put_pixel(x, y, Rgba([250, 250, 245, 255]));
        }
    }
    // Old text to be replaced.
    for x in 30..120 {
        img.put_pixel(x, 40, Rgba([0, 0, 0, 255]));
    }
    (img, bbox)
}

fn digest(img: &RgbaImage) -> String {
    Sha256::digest(img.as_raw()).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn golden_sample() {
    let (img, bbox) = golden_canvas();
    let fonts = FontStack::pinned();
    let layout = wrap_text(GOLDEN_TEXT, (bbox.w, bbox.h), &fonts, &WrapConfig::default()).unwrap();
    assert!(layout.fits);
    let out = paste_text(&img, bbox, &layout, &fonts, &PasteOptions::default()).unwrap();

    let mut changed_inside = 0;
    for (x, y, p) in out.enumerate_pixels() {
        if bbox.contains(x, y) {
            changed_inside += (p != img.get_pixel(x, y)) as usize;
        } else {
            assert_eq!(p, img.get_pixel(x, y), "pixel ({x},{y}) outside the box changed");
        }
    }
    assert!(changed_inside > 100);
    assert_eq!(digest(&out), GOLDEN_SHA256);
}

// Frozen from the first render with the bundled font.
const GOLDEN_SHA256: &str = "225e5b9e1c1c7fd6517186124439a1e0c1c0e95ae802ac4b670a08a2a43089e5";

#[test]
fn empty_layout_clears_to_background() {
    let (img, bbox) = golden_canvas();
    let fonts = FontStack::pinned();
    let layout = wrap_text("", (bbox.w, bbox.h), &fonts, &WrapConfig::default()).unwrap();
    let out = paste_text(&img, bbox, &layout, &fonts, &PasteOptions::default()).unwrap();
    for (x, y, p) in out.enumerate_pixels() {
        if bbox.contains(x, y) {
            assert_eq!(*p, Rgba([250, 250, 245, 255]));
        } else {
            assert_eq!(p, img.get_pixel(x, y));
        }
    }
}

#[test]
fn rejects_overflow_and_out_of_image_boxes() {
    let (img, bbox) = golden_canvas();
    let fonts = FontStack::pinned();
    let mut layout = wrap_text("x", (bbox.w, bbox.h), &fonts, &WrapConfig::default()).unwrap();
    assert!(paste_text(&img, BBox::new(200, 100, 50, 50), &layout, &fonts, &PasteOptions::default()).is_err());
    layout.fits = false;
    assert!(paste_text(&img, bbox, &layout, &fonts, &PasteOptions::default()).is_err());
}

#[test]
fn file_round_trip_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (img, bbox) = golden_canvas();
    let input = dir.path().join("in.png");
    img.save(&input).unwrap();
    let fonts = FontStack::pinned();
    let (a, b) = (dir.path().join("a.png"), dir.path().join("b.png"));
    for out in [&a, &b] {
        compose_file(&input, out, bbox, GOLDEN_TEXT, &fonts, &WrapConfig::default(), &PasteOptions::default()).unwrap();
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn pinned_font_measures_monotonically() {
    let fonts = FontStack::pinned();
    let mut prev = 0.0;
    for size in [6.0, 8.0, 12.0, 16.0, 30.0] {
        let (w, _) = fonts.measure("Kangaroo", size);
        assert!(w > prev);
        prev = w;
    }
    let mut prev = 0.0;
    for n in 1..30 {
        let (w, _) = fonts.measure(&"W".repeat(n), 12.0);
        assert!(w >= prev);
        prev = w;
    }
}

#[test]
fn fallback_fonts_from_dir() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.ttf"), forge_compose::PINNED_FONT).unwrap();
    std::fs::write(dir.path().join("notes.txt"), "ignored").unwrap();
    let fonts = FontStack::from_dir(dir.path()).unwrap();
    assert_eq!(fonts.measure("abc", 12.0), FontStack::pinned().measure("abc", 12.0));
    std::fs::write(dir.path().join("broken.otf"), b"nope").unwrap();
    assert!(FontStack::from_dir(dir.path()).is_err());
}
