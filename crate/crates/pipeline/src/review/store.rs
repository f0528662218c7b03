//! Event-sourced review task store. Every state change is an event appended
//! to `events.jsonl`; reopening a store replays the log.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};

use forge_core::model::BBox;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskKind {
    CorruptionFix,
    BboxAdjust,
    TranslationScore,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskStatus {
    Open,
    Fixed,
    Discarded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelScale {
    FourPoint,
    TenPoint,
}

/// What the reviewer needs to see. Fields not relevant to a kind stay empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TaskPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_ref: Option<String>,
    /// `(width, height)` of the image, used to validate bbox edits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_size: Option<(u32, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Corrected text and/or bounding box, in original-image pixels.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FixRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BBox>,
    /// Version the client last saw; a stale version loses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub scale: LabelScale,
    pub value: i32,
    pub reviewer_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HumanQualityLabel {
    pub scale: LabelScale,
    pub value: i32,
    pub reviewer_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_review: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_reviewer_id: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReviewTask {
    pub task_id: u64,
    pub kind: TaskKind,
    pub problem_id: String,
    /// Target language for translation tasks; `None` applies to every language.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    pub payload: TaskPayload,
    pub status: TaskStatus,
    pub version: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fix: Option<FixRequest>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<HumanQualityLabel>,
    /// Fixed and not yet picked up by the next corruption re-check.
    #[serde(default)]
    pub recheck_pending: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum ReviewEvent {
    Enqueued { task_id: u64, kind: TaskKind, problem_id: String, language: Option<String>, payload: TaskPayload },
    Fixed { task_id: u64, fix: FixRequest },
    Scored { task_id: u64, score: ScoreRequest },
    Rechecked { task_ids: Vec<u64> },
}

#[derive(Debug, thiserror::Error)]
pub enum ReviewError {
    #[error("task {0} not found")]
    NotFound(u64),
    #[error("task {task_id} is not open ({reason})")]
    TaskNotOpen { task_id: u64, reason: String },
    #[error("task {task_id} is a {kind:?} task")]
    WrongKind { task_id: u64, kind: TaskKind },
    #[error("label {value} outside the {scale:?} range")]
    OutOfRangeLabel { scale: LabelScale, value: i32 },
    #[error("bbox {bbox:?} lies outside the {width}x{height} image")]
    InvalidBbox { bbox: BBox, width: u32, height: u32 },
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("store i/o on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("corrupt event log line {line}: {reason}")]
    CorruptLog { line: usize, reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueFilter {
    #[serde(default)]
    pub kind: Option<TaskKind>,
    #[serde(default)]
    pub status: Option<TaskStatus>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueuePage {
    pub tasks: Vec<ReviewTask>,
    pub total: usize,
    pub page: usize,
    pub per_page: usize,
}

/// In-memory task state rebuilt purely from events.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReviewState {
    tasks: Vec<ReviewTask>,
}

impl ReviewState {
    pub fn replay<'a>(events: impl IntoIterator<Item = &'a ReviewEvent>) -> Result<Self, ReviewError> {
        let mut s = Self::default();
        for e in events {
            s.apply(e)?;
        }
        Ok(s)
    }

    pub fn tasks(&self) -> &[ReviewTask] {
        &self.tasks
    }

    fn task_mut(&mut self, id: u64) -> Result<&mut ReviewTask, ReviewError> {
        self.tasks.iter_mut().find(|t| t.task_id == id).ok_or(ReviewError::NotFound(id))
    }

    /// Validate and apply one event. Rejected events leave the state unchanged.
    pub fn apply(&mut self, event: &ReviewEvent) -> Result<(), ReviewError> {
        match event {
            ReviewEvent::Enqueued { task_id, kind, problem_id, language, payload } => {
                if self.tasks.iter().any(|t| t.task_id == *task_id) {
                    return Err(ReviewError::InvalidRequest(format!("task id {task_id} reused")));
                }
                self.tasks.push(ReviewTask {
                    task_id: *task_id,
                    kind: *kind,
                    problem_id: problem_id.clone(),
                    language: language.clone(),
                    payload: payload.clone(),
                    status: TaskStatus::Open,
                    version: 0,
                    fix: None,
                    label: None,
                    recheck_pending: false,
                });
            }
            ReviewEvent::Fixed { task_id, fix } => {
                let task = self.task_mut(*task_id)?;
                check_open(task, fix.version)?;
                if task.kind == TaskKind::TranslationScore {
                    return Err(ReviewError::WrongKind { task_id: *task_id, kind: task.kind });
                }
                if fix.text.is_none() && fix.bbox.is_none() {
                    return Err(ReviewError::InvalidRequest("fix needs text or bbox".into()));
                }
                if let Some(bbox) = fix.bbox {
                    let bad_size = bbox.w == 0 || bbox.h == 0;
                    match task.payload.image_size {
                        Some((width, height)) if bad_size || !bbox.fits_within(width, height) => {
                            return Err(ReviewError::InvalidBbox { bbox, width, height });
                        }
                        None if bad_size => return Err(ReviewError::InvalidBbox { bbox, width: 0, height: 0 }),
                        _ => {}
                    }
                }
                task.status = TaskStatus::Fixed;
                task.fix = Some(FixRequest { version: None, ..fix.clone() });
                task.recheck_pending = true;
                task.version += 1;
            }
            ReviewEvent::Scored { task_id, score } => {
                let task = self.task_mut(*task_id)?;
                check_open(task, score.version)?;
                if task.kind != TaskKind::TranslationScore {
                    return Err(ReviewError::WrongKind { task_id: *task_id, kind: task.kind });
                }
                let range = match score.scale {
                    LabelScale::FourPoint => 1..=4,
                    LabelScale::TenPoint => 0..=10,
                };
                if !range.contains(&score.value) {
                    return Err(ReviewError::OutOfRangeLabel { scale: score.scale, value: score.value });
                }
                let (label, status) = match task.label.take() {
                    None => {
                        let label = HumanQualityLabel {
                            scale: score.scale,
                            value: score.value,
                            reviewer_id: score.reviewer_id.clone(),
                            second_review: None,
                            second_reviewer_id: None,
                        };
                        let status = match score.scale {
                            LabelScale::FourPoint if score.value <= 2 => TaskStatus::Open,
                            LabelScale::FourPoint => TaskStatus::Fixed,
                            LabelScale::TenPoint if score.value < 5 => TaskStatus::Discarded,
                            LabelScale::TenPoint => TaskStatus::Fixed,
                        };
                        (label, status)
                    }
                    Some(first) => {
                        let reject = |first: HumanQualityLabel, task: &mut ReviewTask, msg: String| {
                            task.label = Some(first);
                            Err(ReviewError::InvalidRequest(msg))
                        };
                        if score.scale != first.scale {
                            return reject(first, task, "second review must use the first review's scale".into());
                        }
                        if score.reviewer_id == first.reviewer_id {
                            return reject(first, task, "second review needs an independent reviewer".into());
                        }
                        let status = if score.value <= 2 { TaskStatus::Discarded } else { TaskStatus::Fixed };
                        let label = HumanQualityLabel {
                            second_review: Some(score.value),
                            second_reviewer_id: Some(score.reviewer_id.clone()),
                            ..first
                        };
                        (label, status)
                    }
                };
                task.label = Some(label);
                task.status = status;
                task.version += 1;
            }
            ReviewEvent::Rechecked { task_ids } => {
                for id in task_ids {
                    let task = self.task_mut(*id)?;
                    task.recheck_pending = false;
                    task.version += 1;
                }
            }
        }
        Ok(())
    }
}

fn check_open(task: &ReviewTask, expected: Option<u64>) -> Result<(), ReviewError> {
    if task.status != TaskStatus::Open {
        return Err(ReviewError::TaskNotOpen { task_id: task.task_id, reason: format!("status {:?}", task.status) });
    }
    if let Some(v) = expected {
        if v != task.version {
            return Err(ReviewError::TaskNotOpen {
                task_id: task.task_id,
                reason: format!("stale version {v}, current {}", task.version),
            });
        }
    }
    Ok(())
}

struct Inner {
    state: ReviewState,
    events: Vec<ReviewEvent>,
    log: Option<(PathBuf, File)>,
}

/// Thread-safe handle; clones share the same store.
#[derive(Clone)]
pub struct ReviewStore {
    inner: Arc<Mutex<Inner>>,
}

pub const EVENT_LOG: &str = "events.jsonl";

impl ReviewStore {
    pub fn in_memory() -> Self {
        Self { inner: Arc::new(Mutex::new(Inner { state: ReviewState::default(), events: Vec::new(), log: None })) }
    }

    /// Open (or create) a store directory and replay its event log.
    pub fn open(dir: &Path) -> Result<Self, ReviewError> {
        let path = dir.join(EVENT_LOG);
        let io_err = |source| ReviewError::Io { path: path.clone(), source };
        fs::create_dir_all(dir).map_err(io_err)?;
        let mut events = Vec::new();
        if path.exists() {
            let reader = BufReader::new(File::open(&path).map_err(io_err)?);
            for (i, line) in reader.lines().enumerate() {
                let line = line.map_err(io_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                let e: ReviewEvent = serde_json::from_str(&line)
                    .map_err(|e| ReviewError::CorruptLog { line: i + 1, reason: e.to_string() })?;
                events.push(e);
            }
        }
        let state = ReviewState::replay(&events)?;
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err)?;
        Ok(Self { inner: Arc::new(Mutex::new(Inner { state, events, log: Some((path, file)) })) })
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn commit(inner: &mut Inner, event: ReviewEvent) -> Result<(), ReviewError> {
        let mut next = inner.state.clone();
        next.apply(&event)?;
        if let Some((path, file)) = inner.log.as_mut() {
            let io_err = |source| ReviewError::Io { path: path.clone(), source };
            let line = serde_json::to_string(&event).expect("events serialize");
            writeln!(file, "{line}").and_then(|_| file.flush()).map_err(io_err)?;
        }
        inner.state = next;
        inner.events.push(event);
        Ok(())
    }

    pub fn enqueue(
        &self,
        kind: TaskKind,
        problem_id: impl Into<String>,
        language: Option<String>,
        payload: TaskPayload,
    ) -> Result<ReviewTask, ReviewError> {
        let mut inner = self.lock();
        let task_id = inner.state.tasks.iter().map(|t| t.task_id + 1).max().unwrap_or(1);
        Self::commit(
            &mut inner,
            ReviewEvent::Enqueued { task_id, kind, problem_id: problem_id.into(), language, payload },
        )?;
        Ok(inner.state.tasks.last().expect("just pushed").clone())
    }

    /// Enqueue unless an open task of the same kind, problem and language
    /// exists, in which case that task is returned.
    pub fn enqueue_unless_open(
        &self,
        kind: TaskKind,
        problem_id: &str,
        language: Option<String>,
        payload: TaskPayload,
    ) -> Result<ReviewTask, ReviewError> {
        self.enqueue_unless(kind, problem_id, language, payload, |t| t.status == TaskStatus::Open)
    }

    /// Enqueue unless any task of the same kind, problem and language exists.
    pub fn enqueue_if_absent(
        &self,
        kind: TaskKind,
        problem_id: &str,
        language: Option<String>,
        payload: TaskPayload,
    ) -> Result<ReviewTask, ReviewError> {
        self.enqueue_unless(kind, problem_id, language, payload, |_| true)
    }

    fn enqueue_unless(
        &self,
        kind: TaskKind,
        problem_id: &str,
        language: Option<String>,
        payload: TaskPayload,
        existing: impl Fn(&ReviewTask) -> bool,
    ) -> Result<ReviewTask, ReviewError> {
        let mut inner = self.lock();
        if let Some(t) = inner
            .state
            .tasks
            .iter()
            .find(|t| t.kind == kind && t.problem_id == problem_id && t.language == language && existing(t))
        {
            return Ok(t.clone());
        }
        let task_id = inner.state.tasks.iter().map(|t| t.task_id + 1).max().unwrap_or(1);
        let event = ReviewEvent::Enqueued { task_id, kind, problem_id: problem_id.into(), language, payload };
        Self::commit(&mut inner, event)?;
        Ok(inner.state.tasks.last().expect("just pushed").clone())
    }

    pub fn get(&self, task_id: u64) -> Result<ReviewTask, ReviewError> {
        self.lock().state.tasks.iter().find(|t| t.task_id == task_id).cloned().ok_or(ReviewError::NotFound(task_id))
    }

    /// Tasks in enqueue order; `page` counts from 1.
    pub fn list(&self, filter: &QueueFilter, page: usize, per_page: usize) -> QueuePage {
        let (page, per_page) = (page.max(1), per_page.clamp(1, 1000));
        let inner = self.lock();
        let matching: Vec<&ReviewTask> = inner
            .state
            .tasks
            .iter()
            .filter(|t| filter.kind.is_none_or(|k| t.kind == k) && filter.status.is_none_or(|s| t.status == s))
            .collect();
        let tasks = matching.iter().skip((page - 1) * per_page).take(per_page).map(|t| (*t).clone()).collect();
        QueuePage { tasks, total: matching.len(), page, per_page }
    }

    pub fn fix(&self, task_id: u64, fix: FixRequest) -> Result<ReviewTask, ReviewError> {
        let mut inner = self.lock();
        Self::commit(&mut inner, ReviewEvent::Fixed { task_id, fix })?;
        drop(inner);
        self.get(task_id)
    }

    pub fn score(&self, task_id: u64, score: ScoreRequest) -> Result<ReviewTask, ReviewError> {
        let mut inner = self.lock();
        Self::commit(&mut inner, ReviewEvent::Scored { task_id, score })?;
        drop(inner);
        self.get(task_id)
    }

    /// Fixed tasks awaiting re-check; marks them picked up.
    pub fn take_rechecks(&self) -> Result<Vec<ReviewTask>, ReviewError> {
        let mut inner = self.lock();
        let pending: Vec<ReviewTask> = inner.state.tasks.iter().filter(|t| t.recheck_pending).cloned().collect();
        if !pending.is_empty() {
            let task_ids = pending.iter().map(|t| t.task_id).collect();
            Self::commit(&mut inner, ReviewEvent::Rechecked { task_ids })?;
        }
        Ok(pending)
    }

    pub fn tasks(&self) -> Vec<ReviewTask> {
        self.lock().state.tasks.clone()
    }

    pub fn events(&self) -> Vec<ReviewEvent> {
        self.lock().events.clone()
    }

    pub fn state(&self) -> ReviewState {
        self.lock().state.clone()
    }

    /// `(problem_id, language)` pairs discarded by review; a `None` language
    /// means every language.
    pub fn discarded(&self) -> BTreeSet<(String, Option<String>)> {
        self.lock()
            .state
            .tasks
            .iter()
            .filter(|t| t.status == TaskStatus::Discarded)
            .map(|t| (t.problem_id.clone(), t.language.clone()))
            .collect()
    }

    pub fn is_discarded(&self, problem_id: &str, language: &str) -> bool {
        self.lock().state.tasks.iter().any(|t| {
            t.status == TaskStatus::Discarded
                && t.problem_id == problem_id
                && t.language.as_deref().is_none_or(|l| l == language)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn score(value: i32, reviewer: &str) -> ScoreRequest {
        ScoreRequest { scale: LabelScale::FourPoint, value, reviewer_id: reviewer.into(), version: None }
    }

    #[test]
    fn four_point_rules() {
        let s = ReviewStore::in_memory();
        let t = s.enqueue(TaskKind::TranslationScore, "p1", Some("cat".into()), TaskPayload::default()).unwrap();
        assert_eq!(s.score(t.task_id, score(4, "r1")).unwrap().status, TaskStatus::Fixed);

        let t = s.enqueue(TaskKind::TranslationScore, "p2", Some("cat".into()), TaskPayload::default()).unwrap();
        assert_eq!(s.score(t.task_id, score(1, "r1")).unwrap().status, TaskStatus::Open);
        assert!(matches!(s.score(t.task_id, score(1, "r1")), Err(ReviewError::InvalidRequest(_))));
        let done = s.score(t.task_id, score(1, "r2")).unwrap();
        assert_eq!(done.status, TaskStatus::Discarded);
        assert_eq!(done.label.unwrap().second_review, Some(1));
        assert!(s.is_discarded("p2", "cat"));
        assert!(!s.is_discarded("p2", "deu"));

        let t = s.enqueue(TaskKind::TranslationScore, "p3", None, TaskPayload::default()).unwrap();
        s.score(t.task_id, score(2, "r1")).unwrap();
        assert_eq!(s.score(t.task_id, score(3, "r2")).unwrap().status, TaskStatus::Fixed);
    }

    #[test]
    fn ten_point_rules() {
        let s = ReviewStore::in_memory();
        let ten = |v| ScoreRequest { scale: LabelScale::TenPoint, value: v, reviewer_id: "r".into(), version: None };
        let a = s.enqueue(TaskKind::TranslationScore, "a", None, TaskPayload::default()).unwrap();
        assert!(matches!(s.score(a.task_id, ten(11)), Err(ReviewError::OutOfRangeLabel { .. })));
        assert_eq!(s.score(a.task_id, ten(4)).unwrap().status, TaskStatus::Discarded);
        let b = s.enqueue(TaskKind::TranslationScore, "b", None, TaskPayload::default()).unwrap();
        assert_eq!(s.score(b.task_id, ten(5)).unwrap().status, TaskStatus::Fixed);
    }

    #[test]
    fn fix_rules() {
        let s = ReviewStore::in_memory();
        let payload = TaskPayload { image_size: Some((100, 50)), ..TaskPayload::default() };
        let t = s.enqueue(TaskKind::BboxAdjust, "p", None, payload).unwrap();
        let bad = FixRequest { bbox: Some(BBox::new(90, 0, 20, 10)), ..FixRequest::default() };
        assert!(matches!(s.fix(t.task_id, bad), Err(ReviewError::InvalidBbox { .. })));
        assert!(matches!(s.fix(t.task_id, FixRequest::default()), Err(ReviewError::InvalidRequest(_))));
        let stale = FixRequest { text: Some("x".into()), version: Some(5), ..FixRequest::default() };
        assert!(matches!(s.fix(t.task_id, stale), Err(ReviewError::TaskNotOpen { .. })));
        let good = FixRequest { bbox: Some(BBox::new(10, 0, 20, 10)), version: Some(0), ..FixRequest::default() };
        assert_eq!(s.fix(t.task_id, good.clone()).unwrap().status, TaskStatus::Fixed);
        assert!(matches!(s.fix(t.task_id, good), Err(ReviewError::TaskNotOpen { .. })));
        assert_eq!(s.take_rechecks().unwrap().len(), 1);
        assert!(s.take_rechecks().unwrap().is_empty());
        let score_task = s.enqueue(TaskKind::TranslationScore, "q", None, TaskPayload::default()).unwrap();
        assert!(matches!(
            s.fix(score_task.task_id, FixRequest { text: Some("t".into()), ..FixRequest::default() }),
            Err(ReviewError::WrongKind { .. })
        ));
    }

    #[test]
    fn reopen_replays_log() {
        let dir = tempfile::tempdir().unwrap();
        let s = ReviewStore::open(dir.path()).unwrap();
        let t = s.enqueue(TaskKind::CorruptionFix, "p", None, TaskPayload::default()).unwrap();
        s.fix(t.task_id, FixRequest { text: Some("fixed".into()), ..FixRequest::default() }).unwrap();
        let u = s.enqueue(TaskKind::TranslationScore, "p", Some("deu".into()), TaskPayload::default()).unwrap();
        s.score(u.task_id, score(2, "a")).unwrap();
        let before = s.state();
        drop(s);
        let again = ReviewStore::open(dir.path()).unwrap();
        assert_eq!(again.state(), before);
        assert_eq!(ReviewState::replay(&again.events()).unwrap(), before);
    }
}
