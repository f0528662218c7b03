//! Metric validation: per-language Spearman correlation between a
//! reference-free score and a reference-based one, rendered as a table of
//! rho and p-value rows.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{spearman, StatsError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub language: String,
    pub n: usize,
    pub rho: f64,
    pub p_value: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    /// True when every language correlates positively at level `alpha`.
    pub fn all_significant(&self, alpha: f64) -> bool {
        self.rows.iter().all(|r| r.rho > 0.0 && r.p_value < alpha)
    }

    pub fn to_markdown(&self) -> String {
        let mut out =
            String::from("| Target translation language | Spearman's rho | p-value | n |\n|---|---|---|---|\n");
        for r in &self.rows {
            let _ = writeln!(out, "| {} | {:.4} | {:.3e} | {} |", r.language, r.rho, r.p_value, r.n);
        }
        out
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("language\tn\trho\tp_value\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", r.language, r.n, r.rho, r.p_value);
        }
        out
    }
}

/// One row per `(language, candidate scores, reference scores)` input, in
/// input order.
pub fn validate_metric(inputs: &[(String, Vec<f64>, Vec<f64>)]) -> Result<ValidationReport, StatsError> {
    let rows = inputs
        .iter()
        .map(|(language, candidate, reference)| {
            let c = spearman(candidate, reference)?;
            Ok(ValidationRow { language: language.clone(), n: c.n, rho: c.rho, p_value: c.p_value })
        })
        .collect::<Result<_, StatsError>>()?;
    Ok(ValidationReport { rows })
}

/// Parse two numeric columns separated by whitespace, a comma or a tab.
/// Blank lines and `#` comments are skipped, as is a non-numeric first line
/// (a header).
pub fn parse_two_columns(text: &str) -> Result<(Vec<f64>, Vec<f64>), StatsError> {
    let (mut x, mut y) = (Vec::new(), Vec::new());
    let mut first = true;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 2 => {
                x.push(v[0]);
                y.push(v[1]);
            }
            Err(_) if first => {}
            _ => {
                return Err(StatsError::Parse { line: i + 1, reason: format!("expected two numbers, got {line:?}") });
            }
        }
        first = false;
    }
    Ok((x, y))
}
