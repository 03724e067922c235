//! Metric reports: per-class rows plus `Mean` (class average) and `All`
//! (pooled recomputation) scopes, serialized as CSV or JSON.
//!
//! CSV carries the rows only (`scope,metric,value,count`, values with 17
//! significant digits so they round-trip exactly); JSON mirrors the rows and
//! adds run metadata.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MEAN_SCOPE: &str = "Mean";
pub const ALL_SCOPE: &str = "All";
pub const CSV_HEADER: &str = "scope,metric,value,count";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("row {index}: non-finite value for {metric}")]
    NonFiniteValue { index: usize, metric: String },
    #[error("metric {metric}: expected exactly one Mean row, found {found}")]
    MeanRowCount { metric: String, found: usize },
    #[error("metric {metric}: more than one All row")]
    DuplicateAllRow { metric: String },
    #[error("line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub scope: String,
    pub metric: String,
    pub value: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub tool_version: String,
    pub seed: u64,
    pub surface_samples: u64,
    pub fps_points: u64,
    pub degenerate_faces_dropped: u64,
}

impl ReportMetadata {
    pub fn new(seed: u64, surface_samples: u64, fps_points: u64) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            surface_samples,
            fps_points,
            degenerate_faces_dropped: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub metadata: ReportMetadata,
    pub rows: Vec<ReportRow>,
}

impl MetricReport {
    /// Every value finite; per metric exactly one `Mean` row and at most one
    /// `All` row (vacuous for metrics with no rows at all).
    pub fn validate(&self) -> Result<(), ReportError> {
        let mut mean_count: BTreeMap<&str, usize> = BTreeMap::new();
        let mut all_count: BTreeMap<&str, usize> = BTreeMap::new();
        for (index, row) in self.rows.iter().enumerate() {
            if !row.value.is_finite() {
                return Err(ReportError::NonFiniteValue { index, metric: row.metric.clone() });
            }
            *mean_count.entry(row.metric.as_str()).or_default() +=
                usize::from(row.scope == MEAN_SCOPE);
            *all_count.entry(row.metric.as_str()).or_default() +=
                usize::from(row.scope == ALL_SCOPE);
        }
        for (metric, &found) in &mean_count {
            if found != 1 {
                return Err(ReportError::MeanRowCount { metric: metric.to_string(), found });
            }
        }
        for (metric, &found) in &all_count {
            if found > 1 {
                return Err(ReportError::DuplicateAllRow { metric: metric.to_string() });
            }
        }
        Ok(())
    }
}

/// 17 significant digits: enough for an exact f64 round-trip.
pub fn format_value(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_field(&row.scope));
        out.push(',');
        out.push_str(&csv_field(&row.metric));
        out.push(',');
        out.push_str(&format_value(row.value));
        out.push(',');
        out.push_str(&row.count.to_string());
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn split_csv_line(line: &str, number: usize) -> Result<Vec<String>, ReportError> {
    let mut fields = Vec::new();
    let mut field = String::new();
    let mut chars = line.chars().peekable();
    let mut quoted = false;
    while let Some(c) = chars.next() {
        if quoted {
            if c == '"' {
                if chars.peek() == Some(&'"') {
                    chars.next();
                    field.push('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push(c);
            }
        } else {
            match c {
                '"' if field.is_empty() => quoted = true,
                ',' => fields.push(std::mem::take(&mut field)),
                _ => field.push(c),
            }
        }
    }
    if quoted {
        return Err(ReportError::ParseError {
            line: number,
            message: "unterminated quoted field".into(),
        });
    }
    fields.push(field);
    Ok(fields)
}

/// Parses a `scope,metric,value,count` CSV (as written by [`rows_to_csv`]).
pub fn rows_from_csv(text: &str) -> Result<Vec<ReportRow>, ReportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == CSV_HEADER => {}
        _ => {
            return Err(ReportError::ParseError {
                line: 1,
                message: format!("expected header `{CSV_HEADER}`"),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let fields = split_csv_line(raw, line)?;
        if fields.len() != 4 {
            return Err(ReportError::ParseError {
                line,
                message: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let value: f64 = fields[2].parse().map_err(|_| ReportError::ParseError {
            line,
            message: format!("bad value {:?}", fields[2]),
        })?;
        if !value.is_finite() {
            return Err(ReportError::ParseError {
                line,
                message: "non-finite value".into(),
            });
        }
        let count: u64 = fields[3].parse().map_err(|_| ReportError::ParseError {
            line,
            message: format!("bad count {:?}", fields[3]),
        })?;
        rows.push(ReportRow {
            scope: fields[0].clone(),
            metric: fields[1].clone(),
            value,
            count,
        });
    }
    Ok(rows)
}

pub fn write_report(
    report: &MetricReport,
    path: &Path,
    format: ReportFormat,
) -> Result<(), ReportError> {
    report.validate()?;
    let text = match format {
        ReportFormat::Csv => rows_to_csv(&report.rows),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        }
    };
    fs::write(path, text)?;
    Ok(())
}

pub fn read_report_json(path: &Path) -> Result<MetricReport, ReportError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(scope: &str, metric: &str, value: f64, count: u64) -> ReportRow {
        ReportRow { scope: scope.into(), metric: metric.into(), value, count }
    }

    fn meta() -> ReportMetadata {
        ReportMetadata::new(0, 1000, 64)
    }

    #[test]
    fn csv_row_count_for_five_classes_mean_all() {
        let mut rows: Vec<ReportRow> = ["Chair", "Plane", "Car", "Table", "Rifle"]
            .iter()
            .map(|c| row(c, "1-NNA", 50.0, 100))
            .collect();
        rows.push(row(MEAN_SCOPE, "1-NNA", 50.0, 5));
        rows.push(row(ALL_SCOPE, "1-NNA", 50.0, 500));
        let csv = rows_to_csv(&rows);
        assert_eq!(csv.lines().count(), 8); // header + 7 data rows
    }

    #[test]
    fn empty_rows_is_header_only() {
        assert_eq!(rows_to_csv(&[]), "scope,metric,value,count\n");
    }

    #[test]
    fn csv_values_round_trip_exactly() {
        let values = [49.905655073303, 1.0 / 3.0, 2.2250738585072014e-308, 1e300];
        let rows: Vec<ReportRow> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| row(&format!("c{i}"), "m", v, i as u64))
            .collect();
        let parsed = rows_from_csv(&rows_to_csv(&rows)).unwrap();
        for (a, b) in rows.iter().zip(&parsed) {
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.count, b.count);
        }
    }

    #[test]
    fn csv_escapes_commas_in_labels() {
        let rows = vec![row("class,with,commas", "m\"q", 1.0, 1)];
        let parsed = rows_from_csv(&rows_to_csv(&rows)).unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn validation_requires_exactly_one_mean() {
        let report = MetricReport {
            metadata: meta(),
            rows: vec![row("chair", "F1", 10.0, 3)],
        };
        assert!(matches!(
            report.validate(),
            Err(ReportError::MeanRowCount { found: 0, .. })
        ));
    }

    #[test]
    fn validation_rejects_nonfinite() {
        let report = MetricReport {
            metadata: meta(),
            rows: vec![row("chair", "F1", f64::NAN, 3), row(MEAN_SCOPE, "F1", 1.0, 1)],
        };
        assert!(matches!(report.validate(), Err(ReportError::NonFiniteValue { .. })));
    }

    #[test]
    fn validation_accepts_empty() {
        let report = MetricReport { metadata: meta(), rows: vec![] };
        report.validate().unwrap();
    }

    #[test]
    fn json_round_trip() {
        let report = MetricReport {
            metadata: meta(),
            rows: vec![
                row("chair", "F1", 49.905655073303, 7),
                row(MEAN_SCOPE, "F1", 49.905655073303, 1),
            ],
        };
        let text = serde_json::to_string(&report).unwrap();
        let back: MetricReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
    }
}
