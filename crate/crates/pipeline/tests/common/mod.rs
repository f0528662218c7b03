#![allow(dead_code)]

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use forge_core::client::ClientError;
use forge_core::model::{write_manifest, AnswerKey, BBox, DatasetManifest, LanguageTag, ProblemRecord, Split};
use forge_pipeline::clients::{TranslateRequest, TranslationClient};
use image::{Rgba, RgbaImage};

const WORDS: [&str; 12] = [
    "triangle", "square", "kangaroo", "marble", "garden", "clock", "bridge", "ladder", "pencil", "river", "tower",
    "window",
];

/// A question whose trigram profile differs clearly from every other index.
pub fn question(i: usize) -> String {
    format!(
        "Problem {i}: how many {} fit beside the {} if each {} weighs {} grams?",
        WORDS[i % 12],
        WORDS[(i / 12 + 3) % 12],
        WORDS[(i * 7 + 5) % 12],
        100 + i * 37
    )
}

pub fn problem(i: usize) -> ProblemRecord {
    ProblemRecord {
        id: format!("p{i:03}"),
        year: 2010 + (i % 10) as i32,
        level: (i % 6) as u8,
        number: 1 + i as u32,
        question_text: question(i),
        options: [format!("{i}"), format!("{}", i + 1), format!("{}", i + 2), format!("{}", i + 3), String::new()],
        answer_key: AnswerKey::A,
        image_ref: format!("p{i:03}.png"),
        bbox: BBox::new(10, 10, 300, 60),
        has_figure: false,
        category: None,
    }
}

pub fn pool(n: usize) -> Vec<ProblemRecord> {
    (0..n).map(problem).collect()
}

pub fn write_pool(path: &Path, records: &[ProblemRecord]) {
    let m = DatasetManifest {
        language: LanguageTag::new("eng").unwrap(),
        split: Split::Standard,
        entries: records.to_vec(),
    };
    write_manifest(&m, path).unwrap();
}

/// A plain white PNG for every record.
pub fn write_images(dir: &Path, records: &[ProblemRecord]) {
    std::fs::create_dir_all(dir).unwrap();
    for r in records {
        RgbaImage::from_pixel(320, 100, Rgba([255, 255, 255, 255])).save(dir.join(&r.image_ref)).unwrap();
    }
}

/// Echo translator that counts calls; clones share the counter.
#[derive(Clone, Default)]
pub struct CountingEcho {
    pub calls: Arc<AtomicUsize>,
}

impl CountingEcho {
    pub fn count(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl TranslationClient for CountingEcho {
    fn id(&self) -> &str {
        "counting-echo"
    }

    fn translate(&self, request: &TranslateRequest<'_>) -> Result<String, ClientError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        Ok(request.text.to_string())
    }
}
