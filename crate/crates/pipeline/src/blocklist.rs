//! Problem ids excluded by hand, e.g. problems that hinge on language-specific
//! wording. One id per line; `#` starts a comment.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::Path;

use forge_core::model::ProblemRecord;

pub fn parse_blocklist(text: &str) -> BTreeSet<String> {
    text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).filter(|l| !l.is_empty()).map(String::from).collect()
}

pub fn read_blocklist(path: &Path) -> io::Result<BTreeSet<String>> {
    Ok(parse_blocklist(&fs::read_to_string(path)?))
}

/// Split into kept records and removed ids, preserving order.
pub fn apply_blocklist(records: Vec<ProblemRecord>, blocked: &BTreeSet<String>) -> (Vec<ProblemRecord>, Vec<String>) {
    let (removed, kept): (Vec<_>, Vec<_>) = records.into_iter().partition(|r| blocked.contains(&r.id));
    (kept, removed.into_iter().map(|r| r.id).collect())
}
