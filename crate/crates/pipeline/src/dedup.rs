//! Near-duplicate removal across the problem pool.

use forge_core::model::ProblemRecord;
use forge_core::textmetrics::TrigramProfile;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_DEDUP_THRESHOLD: f64 = 0.90;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DroppedDuplicate {
    pub id: String,
    /// The most senior similar record.
    pub kept: String,
    pub similarity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DedupOutcome {
    pub kept: Vec<ProblemRecord>,
    pub dropped: Vec<DroppedDuplicate>,
}

/// Remove every record that has a similar partner (`text_similarity` of the
/// question texts `>= threshold`) ranking better by seniority: lower level,
/// then year, then number, then id. Survivors keep input order, and the
/// surviving set does not depend on that order.
pub fn dedup(pool: Vec<ProblemRecord>, threshold: f64) -> DedupOutcome {
    assert!(threshold > 0.0 && threshold <= 1.0, "threshold must lie in (0, 1]");
    let profiles: Vec<TrigramProfile> = pool.par_iter().map(|r| TrigramProfile::new(&r.question_text)).collect();
    let senior_partner: Vec<Option<(usize, f64)>> = (0..pool.len())
        .into_par_iter()
        .map(|i| {
            (0..pool.len())
                .filter(|&j| j != i && pool[j].seniority() < pool[i].seniority())
                .filter_map(|j| {
                    let s = profiles[i].similarity(&profiles[j]);
                    (s >= threshold).then_some((j, s))
                })
                .min_by(|a, b| pool[a.0].seniority().cmp(&pool[b.0].seniority()))
        })
        .collect();
    let mut dropped = Vec::new();
    let mut kept = Vec::new();
    for (i, rec) in pool.iter().enumerate() {
        match senior_partner[i] {
            Some((j, similarity)) => {
                dropped.push(DroppedDuplicate { id: rec.id.clone(), kept: pool[j].id.clone(), similarity })
            }
            None => kept.push(rec.clone()),
        }
    }
    DedupOutcome { kept, dropped }
}
