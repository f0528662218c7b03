//! LLM-as-judge corruption check with a human fix loop through the review
//! store.

use forge_core::model::ProblemRecord;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clients::{JudgeClient, JudgeLabel, JudgeRequest};
use crate::review::{FixRequest, ReviewStore, ReviewTask, TaskKind, TaskPayload, TaskStatus};
use crate::stages::pool;
use crate::PipelineError;

pub const DEFAULT_MAX_ROUNDS: u32 = 5;

/// Loads a record's judge input and, when known, its image size.
pub type ItemLoader<'a> = dyn Fn(&ProblemRecord) -> Result<(JudgeItem, Option<(u32, u32)>), PipelineError> + Sync + 'a;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionFlag {
    pub problem_id: String,
    pub label: JudgeLabel,
    pub round: u32,
    /// Set only once a reviewer fixed the sample.
    pub resolved: bool,
}

/// A sample as shown to the judge.
#[derive(Clone, Debug)]
pub struct JudgeItem {
    pub problem_id: String,
    pub image: Vec<u8>,
    pub transcript: String,
}

/// Judge every item once; returns a flag per sample labelled corrupted. Any
/// judge failure (after the client's own retries) fails the pass.
pub fn corruption_pass(
    batch: &[JudgeItem],
    judge: &dyn JudgeClient,
    round: u32,
    concurrency: usize,
) -> Result<Vec<CorruptionFlag>, PipelineError> {
    let labels: Vec<_> = pool(concurrency)?.install(|| {
        batch
            .par_iter()
            .map(|item| {
                judge.judge(&JudgeRequest {
                    problem_id: &item.problem_id,
                    image: &item.image,
                    transcript: &item.transcript,
                })
            })
            .collect()
    });
    let mut flags = Vec::new();
    for (item, label) in batch.iter().zip(labels) {
        let label = label.map_err(|e| PipelineError::Judge { problem_id: item.problem_id.clone(), source: e })?;
        if label == JudgeLabel::Corrupted {
            flags.push(CorruptionFlag { problem_id: item.problem_id.clone(), label, round, resolved: false });
        }
    }
    Ok(flags)
}

/// Apply a reviewer's fix to a record.
pub fn apply_fix(record: &mut ProblemRecord, fix: &FixRequest) {
    if let Some(text) = &fix.text {
        record.question_text = text.clone();
    }
    if let Some(bbox) = fix.bbox {
        record.bbox = bbox;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorruptionOutcome {
    /// Records judged clean, with reviewer fixes applied, in input order.
    pub clean: Vec<ProblemRecord>,
    pub flags: Vec<CorruptionFlag>,
    /// Flagged and still awaiting a fix.
    pub pending: Vec<String>,
    pub rounds: u32,
}

/// Judge all records, queue flagged ones for review, re-judge whatever
/// reviewers fixed, and stop once a round raises no flags or after
/// `max_rounds`. Records still flagged are held back.
pub fn corruption_loop(
    mut records: Vec<ProblemRecord>,
    load_item: &ItemLoader<'_>,
    judge: &dyn JudgeClient,
    store: &ReviewStore,
    max_rounds: u32,
    concurrency: usize,
) -> Result<CorruptionOutcome, PipelineError> {
    // Every fix so far applies to the fresh records, and round one re-judges
    // them all, so pending re-checks are consumed here.
    store.take_rechecks()?;
    for task in store.tasks() {
        if task.status == TaskStatus::Fixed && task.language.is_none() && is_fix_kind(&task) {
            if let (Some(rec), Some(fix)) = (records.iter_mut().find(|r| r.id == task.problem_id), &task.fix) {
                apply_fix(rec, fix);
            }
        }
    }
    let mut to_judge: Vec<usize> = (0..records.len()).collect();
    let mut all_flags: Vec<CorruptionFlag> = Vec::new();
    let mut rounds = 0;
    while rounds < max_rounds.max(1) && !to_judge.is_empty() {
        rounds += 1;
        let loaded: Vec<(JudgeItem, Option<(u32, u32)>)> =
            to_judge.iter().map(|&i| load_item(&records[i])).collect::<Result<_, _>>()?;
        let items: Vec<JudgeItem> = loaded.iter().map(|(item, _)| item.clone()).collect();
        let flags = corruption_pass(&items, judge, rounds, concurrency)?;
        for flag in &flags {
            let (idx, size) = to_judge
                .iter()
                .zip(&loaded)
                .find(|(&i, _)| records[i].id == flag.problem_id)
                .map(|(&i, (_, size))| (i, *size))
                .expect("flag belongs to the batch");
            let rec = &records[idx];
            let payload = TaskPayload {
                image_ref: Some(rec.image_ref.clone()),
                image_size: size,
                text: Some(rec.question_text.clone()),
                bbox: Some(rec.bbox),
                note: Some(format!("flagged by {} in round {rounds}", judge.id())),
                ..TaskPayload::default()
            };
            store.enqueue_unless_open(TaskKind::CorruptionFix, &rec.id, None, payload)?;
        }
        // Earlier flags on samples judged clean now count as resolved.
        for f in all_flags.iter_mut() {
            if to_judge.iter().any(|&i| records[i].id == f.problem_id)
                && !flags.iter().any(|n| n.problem_id == f.problem_id)
            {
                f.resolved = true;
            }
        }
        let no_new_flags = flags.is_empty();
        all_flags.extend(flags);
        if no_new_flags {
            break;
        }
        to_judge.clear();
        for task in store.take_rechecks()? {
            if task.language.is_some() || !is_fix_kind(&task) {
                continue;
            }
            if let Some(i) = records.iter().position(|r| r.id == task.problem_id) {
                if let Some(fix) = &task.fix {
                    apply_fix(&mut records[i], fix);
                }
                if !to_judge.contains(&i) {
                    to_judge.push(i);
                }
            }
        }
        to_judge.sort_unstable();
    }
    let pending: Vec<String> = all_flags.iter().filter(|f| !f.resolved).map(|f| f.problem_id.clone()).collect();
    let clean = records.into_iter().filter(|r| !pending.contains(&r.id)).collect();
    Ok(CorruptionOutcome { clean, flags: all_flags, pending, rounds })
}

fn is_fix_kind(task: &ReviewTask) -> bool {
    matches!(task.kind, TaskKind::CorruptionFix | TaskKind::BboxAdjust)
}
