//! Score CSV schema shared by `score`, `calibrate`, and `evaluate`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use lfpad::scene::CaptureLabel;

use crate::error::{CliError, CliResult};

/// One scored capture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub capture_id: String,
    pub label: String,
    pub score: f64,
    pub covered_fraction: f64,
    pub probe_d1: f64,
    pub probe_d2: f64,
    pub probe_d3: f64,
}

/// One capture that could not be scored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub capture_id: String,
    pub label: String,
    pub error: String,
}

pub fn write_rows<S: Serialize>(path: &Path, rows: &[S], headers: &[&str]) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    if rows.is_empty() {
        // serde-driven headers only appear with at least one record.
        writer
            .write_record(headers)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(())
}

pub const SCORE_HEADERS: [&str; 7] = [
    "capture_id",
    "label",
    "score",
    "covered_fraction",
    "probe_d1",
    "probe_d2",
    "probe_d3",
];

pub const FAILURE_HEADERS: [&str; 3] = ["capture_id", "label", "error"];

pub fn read_score_rows(path: &Path) -> CliResult<Vec<ScoreRow>> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.deserialize() {
        rows.push(record.map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?);
    }
    Ok(rows)
}

/// Splits score rows into (genuine, spoof_flat, spoof_curved) score lists.
pub fn split_by_class(rows: &[ScoreRow]) -> CliResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut genuine = Vec::new();
    let mut flat = Vec::new();
    let mut curved = Vec::new();
    for row in rows {
        match CaptureLabel::parse(&row.label) {
            Ok(CaptureLabel::Genuine3d) => genuine.push(row.score),
            Ok(CaptureLabel::SpoofFlat) => flat.push(row.score),
            Ok(CaptureLabel::SpoofCurved) => curved.push(row.score),
            Err(_) => {
                return Err(CliError::Data(format!(
                    "{}: unknown label {:?}",
                    row.capture_id, row.label
                )))
            }
        }
    }
    Ok((genuine, flat, curved))
}

/// Reads a plain score list: either a scores.csv (the `score` column) or a
/// headerless single column of numbers.
pub fn read_score_column(path: &Path) -> CliResult<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let first = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| CliError::Data(format!("{}: empty score file", path.display())))?;
    if first.trim().parse::<f64>().is_ok() {
        return text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
            })
            .collect();
    }
    let rows = read_score_rows(path)?;
    Ok(rows.into_iter().map(|r| r.score).collect())
}
