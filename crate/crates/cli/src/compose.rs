use std::path::PathBuf;

use anyhow::{Context, Result};
use forge_compose::{compose_file, ComposeError, FontStack, PasteOptions, WrapConfig};
use forge_core::model::read_manifest;
use serde::Serialize;

use crate::io::write_jsonl;

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    manifest: PathBuf,
    /// Extra fonts tried before the bundled one.
    #[arg(long)]
    font_dir: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Where `image_ref` paths resolve; defaults to the manifest's directory.
    #[arg(long)]
    images_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 16.0)]
    initial_font: f32,
    #[arg(long, default_value_t = 6.0)]
    min_font: f32,
    #[arg(long, default_value_t = 1.2)]
    line_spacing: f32,
}

#[derive(Serialize)]
struct ComposeLine {
    id: String,
    output: Option<PathBuf>,
    font_size: Option<f32>,
    lines: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

pub fn run(args: Args) -> Result<()> {
    let manifest = read_manifest(&args.manifest)?;
    let images = match args.images_dir {
        Some(d) => d,
        None => args.manifest.parent().map(PathBuf::from).unwrap_or_default(),
    };
    let fonts = match &args.font_dir {
        Some(d) => FontStack::from_dir(d)?,
        None => FontStack::pinned(),
    };
    let cfg = WrapConfig {
        initial_font: args.initial_font,
        min_font: args.min_font,
        line_spacing: args.line_spacing,
        ..WrapConfig::default()
    };
    std::fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let mut report = Vec::with_capacity(manifest.entries.len());
    let mut failed = 0;
    for rec in &manifest.entries {
        let out = args.out_dir.join(format!("{}.png", rec.id));
        let opts = PasteOptions::default();
        let line =
            match compose_file(&images.join(&rec.image_ref), &out, rec.bbox, &rec.question_text, &fonts, &cfg, &opts) {
                Ok(layout) => ComposeLine {
                    id: rec.id.clone(),
                    output: Some(out),
                    font_size: Some(layout.font_size),
                    lines: Some(layout.lines.len()),
                    error: None,
                },
                Err(e) => {
                    failed += 1;
                    let error = match e {
                        ComposeError::LayoutDoesNotFit => "text does not fit its box at the minimum font size".into(),
                        other => other.to_string(),
                    };
                    ComposeLine { id: rec.id.clone(), output: None, font_size: None, lines: None, error: Some(error) }
                }
            };
        report.push(line);
    }
    write_jsonl(None, &report)?;
    eprintln!("{} composed, {failed} failed", report.len() - failed);
    Ok(())
}
