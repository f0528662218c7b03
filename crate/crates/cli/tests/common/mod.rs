#![allow(dead_code)]

use std::net::{SocketAddr, TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::{Duration, Instant};

use forge_core::model::{write_manifest, AnswerKey, BBox, DatasetManifest, LanguageTag, ProblemRecord, Split};
use image::{Rgba, RgbaImage};

pub const BIN: &str = env!("CARGO_BIN_EXE_forge");

const WORDS: [&str; 12] = [
    "triangle", "square", "kangaroo", "marble", "garden", "clock", "bridge", "ladder", "pencil", "river", "tower",
    "window",
];

pub fn problem(i: usize) -> ProblemRecord {
    ProblemRecord {
        id: format!("p{i:03}"),
        year: 2010 + (i % 10) as i32,
        level: (i % 6) as u8,
        number: 1 + i as u32,
        question_text: format!(
            "Problem {i}: how many {} fit beside the {} if each {} weighs {} grams?",
            WORDS[i % 12],
            WORDS[(i / 12 + 3) % 12],
            WORDS[(i * 7 + 5) % 12],
            100 + i * 37
        ),
        options: [
            format!("{i}"),
            format!("{}", i + 1),
            format!("{}", i + 2),
            format!("{}", i + 3),
            format!("{}", i + 4),
        ],
        answer_key: AnswerKey::ALL[i % 5],
        image_ref: format!("p{i:03}.png"),
        bbox: BBox::new(10, 10, 300, 60),
        has_figure: false,
        category: None,
    }
}

pub fn pool(n: usize) -> Vec<ProblemRecord> {
    (0..n).map(problem).collect()
}

pub fn write_pool(path: &Path, lang: &str, records: &[ProblemRecord]) {
    let m = DatasetManifest {
        language: LanguageTag::new(lang).unwrap(),
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

/// Pool, images and a config for an offline echo run into `out`.
pub fn echo_project(dir: &Path, n: usize, extra: &str) -> PathBuf {
    let records = pool(n);
    write_pool(&dir.join("pool.jsonl"), "eng", &records);
    write_images(&dir.join("images"), &records);
    let config = dir.join("forge.toml");
    let text = format!(
        r#"source_lang = "eng"
languages = ["cat", "deu"]
pool = "pool.jsonl"
out_dir = "out"
images_dir = "images"
translator = {{ kind = "echo", id = "mt" }}
backtranslators = [{{ kind = "echo", id = "bt" }}]
{extra}"#
    );
    std::fs::write(&config, text).unwrap();
    config
}

pub fn forge(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("forge binary runs")
}

/// Run and require success; returns stdout.
pub fn forge_ok(args: &[&str]) -> String {
    let out = forge(args);
    assert!(out.status.success(), "forge {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

pub fn ids(path: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(path).unwrap_or_default();
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect()
}

/// `forge review-serve` on a free port; killed on drop.
pub struct ReviewServer {
    child: Child,
    pub base: String,
}

impl ReviewServer {
    pub fn start(store: &Path) -> Self {
        let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let child = Command::new(BIN)
            .args(["review-serve", "--port", &port.to_string(), "--store"])
            .arg(store)
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap();
        let addr: SocketAddr = format!("127.0.0.1:{port}").parse().unwrap();
        let deadline = Instant::now() + Duration::from_secs(10);
        while TcpStream::connect(addr).is_err() {
            assert!(Instant::now() < deadline, "review service did not start");
            std::thread::sleep(Duration::from_millis(20));
        }
        Self { child, base: format!("http://{addr}") }
    }
}

impl Drop for ReviewServer {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
