//! Human-participant comparison: competition scores, percentile ranks and
//! the per-problem difficulty indices correlated against model accuracy.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::stats::{spearman, CorrelationResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "C")]
    Correct,
    #[serde(rename = "I")]
    Incorrect,
    #[serde(rename = "B")]
    Blank,
}

#[derive(Debug, thiserror::Error)]
pub enum HumanError {
    #[error("no participants at level {0}")]
    NoParticipants(u8),
    #[error("need at least 5 participants for 20% slices, got {0}")]
    InsufficientParticipants(usize),
    #[error("participants span several levels: {0:?}")]
    MixedLevels(Vec<u8>),
    #[error("participant {0} does not cover the level's problem list")]
    IncompleteRecord(String),
    #[error("duplicate outcome for participant {participant} problem {problem}")]
    DuplicateOutcome { participant: String, problem: u32 },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HumanRecord {
    pub participant_id: String,
    pub level: u8,
    /// Outcome per problem number.
    pub outcomes: BTreeMap<u32, Outcome>,
}

impl HumanRecord {
    pub fn count(&self, outcome: Outcome) -> usize {
        self.outcomes.values().filter(|&&o| o == outcome).count()
    }

    /// Keep only the listed problems.
    pub fn restricted_to(&self, problems: &BTreeSet<u32>) -> HumanRecord {
        HumanRecord {
            participant_id: self.participant_id.clone(),
            level: self.level,
            outcomes: self.outcomes.iter().filter(|(k, _)| problems.contains(k)).map(|(k, v)| (*k, *v)).collect(),
        }
    }
}

/// Correct answers plus one fifth of the blanks (the expected gain from a
/// random guess on each blank).
pub fn human_score(record: &HumanRecord) -> f64 {
    record.count(Outcome::Correct) as f64 + record.count(Outcome::Blank) as f64 / 5.0
}

/// Percentage of the level's participants whose score is strictly below
/// `model_score`. Both must be computed on the same problem set.
pub fn percentile_rank(model_score: f64, humans: &[HumanRecord], level: u8) -> Result<f64, HumanError> {
    let scores: Vec<f64> = humans.iter().filter(|h| h.level == level).map(human_score).collect();
    if scores.is_empty() {
        return Err(HumanError::NoParticipants(level));
    }
    let below = scores.iter().filter(|&&s| s < model_score).count();
    Ok(100.0 * below as f64 / scores.len() as f64)
}

/// Organizer difficulty block of a problem within its level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifficultyBlock {
    Easy,
    Medium,
    Hard,
}

impl DifficultyBlock {
    pub fn weight(self) -> f64 {
        match self {
            DifficultyBlock::Easy => 0.33,
            DifficultyBlock::Medium => 0.66,
            DifficultyBlock::Hard => 1.0,
        }
    }
}

/// Split problem numbers, in ascending order, into three consecutive blocks
/// of (near) equal size.
pub fn blocks_by_thirds(problems: &BTreeSet<u32>) -> BTreeMap<u32, DifficultyBlock> {
    let n = problems.len();
    problems
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let block = match i * 3 / n.max(1) {
                0 => DifficultyBlock::Easy,
                1 => DifficultyBlock::Medium,
                _ => DifficultyBlock::Hard,
            };
            (p, block)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemIndices {
    pub problem: u32,
    /// Mean participant accuracy.
    pub difficulty: f64,
    /// Mean accuracy of the top 1% of participants.
    pub difficulty_top1: f64,
    /// Top-20% accuracy minus bottom-20% accuracy.
    pub discriminative: f64,
    pub weight: Option<f64>,
    pub model_accuracy: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifficultyTable {
    pub level: u8,
    pub participants: usize,
    pub rows: Vec<ProblemIndices>,
    pub difficulty_corr: Option<CorrelationResult<f64>>,
    pub difficulty_top1_corr: Option<CorrelationResult<f64>>,
    pub discriminative_corr: Option<CorrelationResult<f64>>,
    pub weight_corr: Option<CorrelationResult<f64>>,
}

/// Participants ordered best first: by score descending, then id ascending.
fn ranked(humans: &[HumanRecord]) -> Vec<&HumanRecord> {
    let mut v: Vec<&HumanRecord> = humans.iter().collect();
    v.sort_by(|a, b| {
        human_score(b)
            .partial_cmp(&human_score(a))
            .expect("finite scores")
            .then_with(|| a.participant_id.cmp(&b.participant_id))
    });
    v
}

fn group_accuracy(group: &[&HumanRecord], problem: u32) -> f64 {
    let correct = group.iter().filter(|h| h.outcomes.get(&problem) == Some(&Outcome::Correct)).count();
    correct as f64 / group.len() as f64
}

/// Per-problem Difficulty, Difficulty-1%, Discriminative and Weight indices for
/// one level, each rank-correlated with the model's per-problem accuracy.
///
/// The 20% slices take `floor(0.2 n)` participants; the 1% slice takes
/// `max(1, ceil(0.01 n))`. Correlations are `None` when undefined (too few
/// problems with model accuracy, or constant inputs).
pub fn difficulty_indices(
    humans: &[HumanRecord],
    model_accuracy: &BTreeMap<u32, f64>,
    blocks: &BTreeMap<u32, DifficultyBlock>,
) -> Result<DifficultyTable, HumanError> {
    let n = humans.len();
    if n < 5 {
        return Err(HumanError::InsufficientParticipants(n));
    }
    let levels: BTreeSet<u8> = humans.iter().map(|h| h.level).collect();
    if levels.len() != 1 {
        return Err(HumanError::MixedLevels(levels.into_iter().collect()));
    }
    let level = humans[0].level;
    let problems: BTreeSet<u32> = humans[0].outcomes.keys().copied().collect();
    if let Some(h) = humans.iter().find(|h| h.outcomes.keys().copied().collect::<BTreeSet<_>>() != problems) {
        return Err(HumanError::IncompleteRecord(h.participant_id.clone()));
    }

    let order = ranked(humans);
    let slice = n / 5;
    let top1 = ((n as f64) * 0.01).ceil().max(1.0) as usize;
    let (top20, bottom20) = (&order[..slice], &order[n - slice..]);

    let rows: Vec<ProblemIndices> = problems
        .iter()
        .map(|&p| ProblemIndices {
            problem: p,
            difficulty: group_accuracy(&order, p),
            difficulty_top1: group_accuracy(&order[..top1], p),
            discriminative: group_accuracy(top20, p) - group_accuracy(bottom20, p),
            weight: blocks.get(&p).map(|b| b.weight()),
            model_accuracy: model_accuracy.get(&p).copied(),
        })
        .collect();

    let corr = |index: &dyn Fn(&ProblemIndices) -> Option<f64>| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|r| Some((index(r)?, r.model_accuracy?))).unzip();
        spearman(&xs, &ys).ok()
    };
    Ok(DifficultyTable {
        level,
        participants: n,
        difficulty_corr: corr(&|r| Some(r.difficulty)),
        difficulty_top1_corr: corr(&|r| Some(r.difficulty_top1)),
        discriminative_corr: corr(&|r| Some(r.discriminative)),
        weight_corr: corr(&|r| r.weight),
        rows,
    })
}

#[derive(Deserialize)]
struct CsvRow {
    participant_id: String,
    level: u8,
    problem_number: u32,
    outcome: Outcome,
}

/// Read `participant_id,level,problem_number,outcome` rows (outcome one of
/// `C`, `I`, `B`) into one record per participant and level.
pub fn read_human_csv<R: Read>(reader: R) -> Result<Vec<HumanRecord>, HumanError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut by_key: BTreeMap<(String, u8), BTreeMap<u32, Outcome>> = BTreeMap::new();
    for row in rdr.deserialize() {
        let row: CsvRow = row?;
        let outcomes = by_key.entry((row.participant_id.clone(), row.level)).or_default();
        if outcomes.insert(row.problem_number, row.outcome).is_some() {
            return Err(HumanError::DuplicateOutcome { participant: row.participant_id, problem: row.problem_number });
        }
    }
    Ok(by_key
        .into_iter()
        .map(|((participant_id, level), outcomes)| HumanRecord { participant_id, level, outcomes })
        .collect())
}
