use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::record::{PointStatus, SweepRecord, COLUMNS};
use crate::error::{Error, Result};

fn output_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Output {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationSummary {
    pub points: usize,
    pub failed_points: usize,
    pub max_norm_leak: f64,
    pub mean_norm_leak: f64,
}

pub fn truncation_summary(records: &[SweepRecord]) -> TruncationSummary {
    let leaks: Vec<f64> = records.iter().filter_map(|r| r.norm_leak).collect();
    TruncationSummary {
        points: records.len(),
        failed_points: records.iter().filter(|r| r.status != PointStatus::Ok).count(),
        max_norm_leak: leaks.iter().cloned().fold(0.0, f64::max),
        mean_norm_leak: if leaks.is_empty() {
            0.0
        } else {
            leaks.iter().sum::<f64>() / leaks.len() as f64
        },
    }
}

/// Writes records as CSV in [`COLUMNS`] order, optionally followed by one extra
/// labelled column and by `wall_time_s`.
pub fn write_csv<W: Write>(
    out: W,
    records: &[SweepRecord],
    extra: Option<(&str, &[String])>,
    timing: bool,
) -> std::result::Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if let Some((name, _)) = extra {
        header.push(name);
    }
    if timing {
        header.push("wall_time_s");
    }
    w.write_record(&header)?;
    for (i, r) in records.iter().enumerate() {
        let mut row = r.fields();
        if let Some((_, values)) = extra {
            row.push(values[i].clone());
        }
        if timing {
            row.push(format!("{:?}", r.wall_time_s));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a CSV file, creating parent directories as needed.
pub(crate) fn write_csv_file(
    path: &Path,
    records: &[SweepRecord],
    extra: Option<(&str, &[String])>,
    timing: bool,
) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| output_error(dir, e))?;
    }
    let file = fs::File::create(path).map_err(|e| output_error(path, e))?;
    write_csv(file, records, extra, timing).map_err(|e| output_error(path, e))
}

/// Pretty-printed JSON sidecar.
pub fn write_metadata(path: &Path, value: &serde_json::Value) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| output_error(dir, e))?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| output_error(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| output_error(path, e))
}
