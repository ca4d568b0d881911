//! Report files.
//!
//! Columns, in order: `eta, N, sup_error, fit_slope, fit_stderr, wall_ms`.
//! Floats are written with 17 significant digits; a missing fit is an empty
//! CSV field or a JSON `null`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::sweep::{ReportRow, ValidationReport, Verdict};
use crate::HarnessError;

pub const COLUMNS: [&str; 6] = [
    "eta",
    "N",
    "sup_error",
    "fit_slope",
    "fit_stderr",
    "wall_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// Format implied by the file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            _ => None,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io {
        path: path.display().to_string(),
        detail: e.to_string(),
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip every `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn raw(v: Option<f64>) -> Box<RawValue> {
    let text = match v {
        Some(v) if v.is_finite() => format_f64(v),
        _ => "null".to_string(),
    };
    RawValue::from_string(text).expect("formatted float is valid JSON")
}

#[derive(Serialize)]
struct JsonRow {
    eta: Box<RawValue>,
    #[serde(rename = "N")]
    n: usize,
    sup_error: Box<RawValue>,
    fit_slope: Box<RawValue>,
    fit_stderr: Box<RawValue>,
    wall_ms: Box<RawValue>,
}

#[derive(Serialize)]
struct JsonFit<'a> {
    #[serde(rename = "N")]
    n: usize,
    slope: Box<RawValue>,
    stderr: Box<RawValue>,
    exact: bool,
    verdict: Verdict,
    reason: &'a str,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    spec: &'a str,
    all_pass: bool,
    rows: Vec<JsonRow>,
    fits: Vec<JsonFit<'a>>,
}

#[derive(Deserialize)]
struct JsonRows {
    rows: Vec<ReportRow>,
}

/// Writes `report` to `path`.
pub fn emit_report(
    report: &ValidationReport,
    path: &Path,
    format: ReportFormat,
) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(file);
            w.write_record(COLUMNS).map_err(|e| io_err(path, e))?;
            let opt = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
            for r in &report.rows {
                w.write_record([
                    format_f64(r.eta),
                    r.n.to_string(),
                    format_f64(r.sup_error),
                    opt(r.fit_slope),
                    opt(r.fit_stderr),
                    format_f64(r.wall_ms),
                ])
                .map_err(|e| io_err(path, e))?;
            }
            w.flush().map_err(|e| io_err(path, e))?;
        }
        ReportFormat::Json => {
            let doc = JsonReport {
                spec: &report.spec,
                all_pass: report.all_pass(),
                rows: report
                    .rows
                    .iter()
                    .map(|r| JsonRow {
                        eta: raw(Some(r.eta)),
                        n: r.n,
                        sup_error: raw(Some(r.sup_error)),
                        fit_slope: raw(r.fit_slope),
                        fit_stderr: raw(r.fit_stderr),
                        wall_ms: raw(Some(r.wall_ms)),
                    })
                    .collect(),
                fits: report
                    .fits
                    .iter()
                    .map(|f| JsonFit {
                        n: f.n,
                        slope: raw(f.slope),
                        stderr: raw(f.stderr),
                        exact: f.exact,
                        verdict: f.verdict,
                        reason: &f.reason,
                    })
                    .collect(),
            };
            let mut w = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| io_err(path, e))?;
            writeln!(w).map_err(|e| io_err(path, e))?;
            w.flush().map_err(|e| io_err(path, e))?;
        }
    }
    Ok(())
}

/// Rows of a CSV report.
pub fn read_csv(path: &Path) -> Result<Vec<ReportRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| io_err(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != COLUMNS {
        return Err(io_err(path, format!("unexpected header {header:?}")));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| io_err(path, format!("{s:?}: {e}")))
    };
    let opt = |s: &str| {
        if s.is_empty() {
            Ok(None)
        } else {
            num(s).map(Some)
        }
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        rows.push(ReportRow {
            eta: num(&rec[0])?,
            n: rec[1]
                .parse()
                .map_err(|e| io_err(path, format!("N: {e}")))?,
            sup_error: num(&rec[2])?,
            fit_slope: opt(&rec[3])?,
            fit_stderr: opt(&rec[4])?,
            wall_ms: num(&rec[5])?,
        });
    }
    Ok(rows)
}

/// Rows of a JSON report.
pub fn read_json(path: &Path) -> Result<Vec<ReportRow>, HarnessError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let doc: JsonRows =
        serde_json::from_reader(BufReader::new(file)).map_err(|e| io_err(path, e))?;
    Ok(doc.rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn non_finite_values_are_null_in_json() {
        assert_eq!(raw(Some(f64::NAN)).get(), "null");
        assert_eq!(raw(None).get(), "null");
    }
}
