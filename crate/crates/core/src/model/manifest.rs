use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{AnswerKey, BBox, Category, LanguageTag, ModelError, ProblemRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Standard,
    HighQuality,
}

/// All problems of one language in one split.
#[derive(Clone, Debug, PartialEq)]
pub struct DatasetManifest {
    pub language: LanguageTag,
    pub split: Split,
    pub entries: Vec<ProblemRecord>,
}

/// One manifest line. Field names are part of the file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestLine {
    pub id: String,
    pub year: i32,
    pub level: u8,
    pub number: u32,
    pub lang: LanguageTag,
    pub split: Split,
    pub question_text: String,
    pub options: [String; 5],
    pub answer_key: AnswerKey,
    pub image_ref: String,
    pub bbox: BBox,
    pub has_figure: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<Category>,
}

impl ManifestLine {
    pub fn from_record(rec: &ProblemRecord, lang: &LanguageTag, split: Split) -> Self {
        Self {
            id: rec.id.clone(),
            year: rec.year,
            level: rec.level,
            number: rec.number,
            lang: lang.clone(),
            split,
            question_text: rec.question_text.clone(),
            options: rec.options.clone(),
            answer_key: rec.answer_key,
            image_ref: rec.image_ref.clone(),
            bbox: rec.bbox,
            has_figure: rec.has_figure,
            category: rec.category,
        }
    }

    pub fn into_record(self) -> ProblemRecord {
        ProblemRecord {
            id: self.id,
            year: self.year,
            level: self.level,
            number: self.number,
            question_text: self.question_text,
            options: self.options,
            answer_key: self.answer_key,
            image_ref: self.image_ref,
            bbox: self.bbox,
            has_figure: self.has_figure,
            category: self.category,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("{path}:{line}: malformed record: {reason}")]
    MalformedRecord { path: PathBuf, line: usize, reason: String },
    #[error("{path}:{line}: duplicate id {id:?}")]
    DuplicateId { path: PathBuf, line: usize, id: String },
    #[error("{path}: manifest has no entries, language and split are unknown")]
    Empty { path: PathBuf },
    #[error("high-quality entry {id:?} missing from the standard split of {language}")]
    SplitContainment { language: LanguageTag, id: String },
    #[error("manifest pair mismatch: {0}")]
    PairMismatch(String),
    #[error("{0}")]
    Invalid(#[from] ModelError),
    #[error("i/o failure on {path}: {source}")]
    IoFailure { path: PathBuf, source: io::Error },
}

impl DatasetManifest {
    pub fn new(language: LanguageTag, split: Split) -> Self {
        Self { language, split, entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.iter().any(|e| e.id == id)
    }

    /// Check entry invariants and id uniqueness.
    pub fn validate(&self) -> Result<(), ManifestError> {
        let mut seen = HashSet::new();
        for (i, e) in self.entries.iter().enumerate() {
            e.validate()?;
            if !seen.insert(e.id.as_str()) {
                return Err(ManifestError::DuplicateId { path: PathBuf::new(), line: i + 1, id: e.id.clone() });
            }
        }
        Ok(())
    }
}

/// Verify that every high-quality entry also appears in the standard split
/// of the same language.
pub fn check_split_containment(
    standard: &DatasetManifest,
    high_quality: &DatasetManifest,
) -> Result<(), ManifestError> {
    if standard.split != Split::Standard || high_quality.split != Split::HighQuality {
        return Err(ManifestError::PairMismatch("expected (standard, high_quality) splits".into()));
    }
    if standard.language != high_quality.language {
        return Err(ManifestError::PairMismatch(format!(
            "languages differ: {} vs {}",
            standard.language, high_quality.language
        )));
    }
    let ids: HashSet<&str> = standard.ids().collect();
    for id in high_quality.ids() {
        if !ids.contains(id) {
            return Err(ManifestError::SplitContainment {
                language: high_quality.language.clone(),
                id: id.to_string(),
            });
        }
    }
    Ok(())
}

/// Write one JSON object per entry. An empty manifest produces an empty file.
pub fn write_manifest(manifest: &DatasetManifest, path: &Path) -> Result<(), ManifestError> {
    let io_err = |source| ManifestError::IoFailure { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut out = BufWriter::new(file);
    for rec in &manifest.entries {
        let line = ManifestLine::from_record(rec, &manifest.language, manifest.split);
        serde_json::to_writer(&mut out, &line).map_err(|e| io_err(e.into()))?;
        out.write_all(b"\n").map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

/// Read a manifest written by [`write_manifest`]. Blank lines are skipped.
///
/// Language and split come from the lines themselves, so an empty file is
/// rejected with [`ManifestError::Empty`]; use [`read_manifest_or_empty`] when
/// the caller knows them.
pub fn read_manifest(path: &Path) -> Result<DatasetManifest, ManifestError> {
    read_lines(path)?.ok_or_else(|| ManifestError::Empty { path: path.to_path_buf() })
}

pub fn read_manifest_or_empty(
    path: &Path,
    language: &LanguageTag,
    split: Split,
) -> Result<DatasetManifest, ManifestError> {
    let manifest = read_lines(path)?.unwrap_or_else(|| DatasetManifest::new(language.clone(), split));
    if manifest.language != *language || manifest.split != split {
        return Err(ManifestError::PairMismatch(format!(
            "{} holds {}/{:?}, expected {}/{:?}",
            path.display(),
            manifest.language,
            manifest.split,
            language,
            split
        )));
    }
    Ok(manifest)
}

fn read_lines(path: &Path) -> Result<Option<DatasetManifest>, ManifestError> {
    let file = File::open(path).map_err(|source| ManifestError::IoFailure { path: path.to_path_buf(), source })?;
    let reader = BufReader::new(file);
    let mut manifest: Option<DatasetManifest> = None;
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| ManifestError::IoFailure { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed =
            |reason: String| ManifestError::MalformedRecord { path: path.to_path_buf(), line: lineno, reason };
        let parsed: ManifestLine = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        let (lang, split) = (parsed.lang.clone(), parsed.split);
        let record = parsed.into_record();
        record.validate().map_err(|e| malformed(e.to_string()))?;
        if !seen.insert(record.id.clone()) {
            return Err(ManifestError::DuplicateId { path: path.to_path_buf(), line: lineno, id: record.id });
        }
        let m = manifest.get_or_insert_with(|| DatasetManifest::new(lang.clone(), split));
        if m.language != lang || m.split != split {
            return Err(malformed(format!(
                "lang/split {}/{:?} differs from first record {}/{:?}",
                lang, split, m.language, m.split
            )));
        }
        m.entries.push(record);
    }
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample(id: &str, level: u8) -> ProblemRecord {
        ProblemRecord {
            id: id.to_string(),
            year: 2024,
            level,
            number: 3,
            question_text: "Quants triangles hi ha?".into(),
            options: ["1".into(), "2".into(), "3".into(), "4".into(), "5".into()],
            answer_key: AnswerKey::B,
            image_ref: format!("img/{id}.png"),
            bbox: BBox::new(0, 0, 100, 20),
            has_figure: true,
            category: None,
        }
    }

    fn eng() -> LanguageTag {
        LanguageTag::new("eng").unwrap()
    }

    #[test]
    fn three_line_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        let mut m = DatasetManifest::new(eng(), Split::Standard);
        m.entries = vec![sample("a", 0), sample("b", 3), sample("c", 7)];
        m.entries[1].category = Some(Category::Logic);
        write_manifest(&m, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert_eq!(read_manifest(&path).unwrap(), m);
    }

    #[test]
    fn line_schema_field_names() {
        let line = ManifestLine::from_record(&sample("a", 1), &eng(), Split::HighQuality);
        let v: serde_json::Value = serde_json::to_value(&line).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        for k in [
            "id",
            "year",
            "level",
            "number",
            "lang",
            "split",
            "question_text",
            "options",
            "answer_key",
            "image_ref",
            "bbox",
            "has_figure",
        ] {
            assert!(keys.contains(&k.to_string()), "missing {k}");
        }
        assert_eq!(v["split"], "high_quality");
        assert_eq!(v["bbox"], serde_json::json!({"x":0,"y":0,"w":100,"h":20}));
        assert!(v.get("category").is_none());
    }

    #[test]
    fn empty_manifest_writes_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        let m = DatasetManifest::new(eng(), Split::Standard);
        write_manifest(&m, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "");
        assert!(matches!(read_manifest(&path), Err(ManifestError::Empty { .. })));
        assert_eq!(read_manifest_or_empty(&path, &eng(), Split::Standard).unwrap(), m);
    }

    #[test]
    fn missing_answer_key_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        let good = serde_json::to_string(&ManifestLine::from_record(&sample("a", 1), &eng(), Split::Standard)).unwrap();
        let mut bad: serde_json::Value = serde_json::from_str(&good).unwrap();
        bad["id"] = "b".into();
        bad.as_object_mut().unwrap().remove("answer_key");
        let mut f = File::create(&path).unwrap();
        writeln!(f, "{good}\n{bad}").unwrap();
        match read_manifest(&path) {
            Err(ManifestError::MalformedRecord { line, reason, .. }) => {
                assert_eq!(line, 2);
                assert!(reason.contains("answer_key"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn level_out_of_range_is_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        let mut line = ManifestLine::from_record(&sample("a", 1), &eng(), Split::Standard);
        line.level = 8;
        std::fs::write(&path, serde_json::to_string(&line).unwrap()).unwrap();
        assert!(matches!(read_manifest(&path), Err(ManifestError::MalformedRecord { line: 1, .. })));
    }

    #[test]
    fn four_options_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        let mut v = serde_json::to_value(ManifestLine::from_record(&sample("a", 1), &eng(), Split::Standard)).unwrap();
        v["options"] = serde_json::json!(["1", "2", "3", "4"]);
        std::fs::write(&path, v.to_string()).unwrap();
        assert!(matches!(read_manifest(&path), Err(ManifestError::MalformedRecord { .. })));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        let line = serde_json::to_string(&ManifestLine::from_record(&sample("a", 1), &eng(), Split::Standard)).unwrap();
        std::fs::write(&path, format!("{line}\n{line}\n")).unwrap();
        assert!(matches!(read_manifest(&path), Err(ManifestError::DuplicateId { line: 2, .. })));
    }

    #[test]
    fn containment_check() {
        let mut std_m = DatasetManifest::new(eng(), Split::Standard);
        std_m.entries = vec![sample("a", 1), sample("b", 1)];
        let mut hq = DatasetManifest::new(eng(), Split::HighQuality);
        hq.entries = vec![sample("b", 1)];
        check_split_containment(&std_m, &hq).unwrap();
        hq.entries.push(sample("z", 1));
        assert!(matches!(check_split_containment(&std_m, &hq), Err(ManifestError::SplitContainment { .. })));
    }
}
