//! Text re-composition for problem images: greedy word wrap with
//! shrink-to-fit, then rendering into the original bounding box.

mod font;
mod layout;
mod paste;

pub use font::{FontStack, GlyphMeasurer, UnitMeasurer, PINNED_FONT};
pub use layout::{wrap_text, TextLayout, WrapConfig};
pub use paste::{compose_file, paste_text, PasteOptions};

use forge_core::model::BBox;

#[derive(Debug, thiserror::Error)]
pub enum ComposeError {
    #[error("bounding box has zero width or height")]
    EmptyBox,
    #[error("invalid wrap config: {0}")]
    InvalidConfig(String),
    #[error("layout does not fit its bounding box")]
    LayoutDoesNotFit,
    #[error("bounding box {bbox:?} exceeds image size {width}x{height}")]
    BoxOutsideImage { bbox: BBox, width: u32, height: u32 },
    #[error("font: {0}")]
    Font(String),
    #[error("render failure: {0}")]
    RenderFailure(String),
}
