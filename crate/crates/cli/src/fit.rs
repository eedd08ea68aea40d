//! Power-law fits of a CSV column over a `t_f` window.

use std::path::Path;

use aia_core::numkit::{fit_power_law, FitResult};
use thiserror::Error;

use crate::output::format_g17;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("column `{0}` not found")]
    MissingColumn(String),
    #[error("row {row}: cannot parse `{value}` in column `{column}`")]
    Parse { row: usize, column: String, value: String },
    #[error("table has several temperatures; pick one with --temp")]
    AmbiguousTemperature,
    #[error("window [{tmin}, {tmax}] holds {got} usable rows, need at least 3")]
    TooFewRows { tmin: f64, tmax: f64, got: usize },
    #[error("fit failed: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRequest {
    pub column: String,
    pub tmin: f64,
    pub tmax: f64,
    /// Restricts open-model tables to one temperature.
    pub temperature: Option<f64>,
}

/// `(t_f, value)` pairs of `req.column` inside the window; empty cells skipped.
pub fn window_points(csv_text: &str, req: &FitRequest) -> Result<Vec<(f64, f64)>, FitError> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = rdr.headers().map_err(|e| FitError::Numerical(e.to_string()))?.clone();
    let idx = |name: &str| headers.iter().position(|h| h == name);
    let t_col = idx("t_f").ok_or_else(|| FitError::MissingColumn("t_f".into()))?;
    let v_col = idx(&req.column).ok_or_else(|| FitError::MissingColumn(req.column.clone()))?;
    let temp_col = idx("T");
    let mut temps_seen: Vec<f64> = Vec::new();
    let mut points = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| FitError::Numerical(e.to_string()))?;
        let parse = |col: usize, name: &str| -> Result<Option<f64>, FitError> {
            let s = rec.get(col).unwrap_or("").trim();
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| FitError::Parse { row, column: name.to_string(), value: s.to_string() })
        };
        if let Some(c) = temp_col {
            if let Some(temp) = parse(c, "T")? {
                match req.temperature {
                    Some(want) if (temp - want).abs() > 1e-12 * want.abs().max(1.0) => continue,
                    Some(_) => {}
                    None if !temps_seen.contains(&temp) => temps_seen.push(temp),
                    None => {}
                }
            }
        }
        let Some(t) = parse(t_col, "t_f")? else { continue };
        if t < req.tmin || t > req.tmax {
            continue;
        }
        if let Some(v) = parse(v_col, &req.column)? {
            points.push((t, v));
        }
    }
    if temps_seen.len() > 1 {
        return Err(FitError::AmbiguousTemperature);
    }
    Ok(points)
}

pub fn fit_csv_text(csv_text: &str, req: &FitRequest) -> Result<FitResult, FitError> {
    let points = window_points(csv_text, req)?;
    if points.len() < 3 {
        return Err(FitError::TooFewRows { tmin: req.tmin, tmax: req.tmax, got: points.len() });
    }
    fit_power_law(&points).map_err(|e| FitError::Numerical(e.to_string()))
}

pub fn fit_csv(path: &Path, req: &FitRequest) -> Result<FitResult, FitError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FitError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    fit_csv_text(&text, req)
}

/// The machine-readable summary line.
pub fn fit_line(column: &str, f: &FitResult) -> String {
    format!("fit {column} A={} p={} rms={}", format_g17(f.amplitude), format_g17(f.exponent), format_g17(f.residual))
}
