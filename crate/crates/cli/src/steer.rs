use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Subcommand, ValueEnum};
use forge_core::model::LanguageTag;
use forge_core::techniques::{apply_steering, compute_steering_vectors};
use forge_core::{ActivationDump32, SteeringConfig32, SteeringVectors32};

use crate::io::read_text;

#[derive(clap::Args)]
pub struct Args {
    #[command(subcommand)]
    command: SteerCommand,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    Qwen25_3b,
    Qwen25_7b,
}

#[derive(Subcommand)]
enum SteerCommand {
    /// Per-layer mean difference between an English dump and another language's dump.
    Compute {
        /// Dump of the non-English language.
        #[arg(long)]
        dump_o: PathBuf,
        #[arg(long)]
        dump_en: PathBuf,
        #[arg(long, default_value = "xxx")]
        lang_o: String,
        /// Vectors as JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Add scaled steering vectors to a dump's hidden states.
    Apply {
        #[arg(long)]
        dump: PathBuf,
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<Preset>,
        /// Steering config as JSON, instead of a preset.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the preset's scale.
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f32>,
        #[arg(long)]
        steer_images: bool,
    },
}

fn read_dump(path: &Path, lang: &str) -> Result<ActivationDump32> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    ActivationDump32::read_from(BufReader::new(file), LanguageTag::new(lang)?)
        .with_context(|| format!("reading {}", path.display()))
}

pub fn run(args: Args) -> Result<()> {
    match args.command {
        SteerCommand::Compute { dump_o, dump_en, lang_o, out } => {
            let o = read_dump(&dump_o, &lang_o)?;
            let en = read_dump(&dump_en, "eng")?;
            let vectors = compute_steering_vectors(&o, &en)?;
            let mut w = BufWriter::new(File::create(&out).with_context(|| format!("creating {}", out.display()))?);
            serde_json::to_writer(&mut w, &vectors)?;
            w.flush()?;
            eprintln!("{} layers x {} hidden", vectors.num_layers(), vectors.hidden_dim());
            Ok(())
        }
        SteerCommand::Apply { dump, vectors, out, preset, config, c, steer_images } => {
            let mut cfg: SteeringConfig32 = match (preset, config) {
                (_, Some(path)) => {
                    serde_json::from_str(&read_text(&path)?).with_context(|| format!("parsing {}", path.display()))?
                }
                (Some(Preset::Qwen25_3b), None) => SteeringConfig32::qwen25_3b(),
                (Some(Preset::Qwen25_7b), None) => SteeringConfig32::qwen25_7b(),
                (None, None) => unreachable!("clap requires a preset or a config"),
            };
            if let Some(c) = c {
                cfg.c = c;
            }
            cfg.steer_images |= steer_images;
            let vectors: SteeringVectors32 = serde_json::from_str(&read_text(&vectors)?)
                .with_context(|| format!("parsing {}", vectors.display()))?;
            let input = read_dump(&dump, "xxx")?;
            let steered = apply_steering(&input, &vectors, &cfg)?;
            let mut w = BufWriter::new(File::create(&out).with_context(|| format!("creating {}", out.display()))?);
            steered.write_to(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}
