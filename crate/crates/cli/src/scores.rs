//! One-column score files: one similarity score per line. A single
//! non-numeric first line is tolerated as a header.

use crate::error::{CliError, CliResult};

pub fn read_scores(text: &str) -> CliResult<Vec<f64>> {
    let mut scores = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => scores.push(v),
            Ok(v) => {
                return Err(CliError::Validation(format!(
                    "line {}: non-finite score {v}",
                    idx + 1
                )))
            }
            Err(_) if idx == 0 => continue, // header
            Err(_) => {
                return Err(CliError::Validation(format!(
                    "line {}: bad score {line:?}",
                    idx + 1
                )))
            }
        }
    }
    if scores.is_empty() {
        return Err(CliError::Validation("score file holds no values".into()));
    }
    Ok(scores)
}
