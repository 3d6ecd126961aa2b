//! Tabular scan results with a summary block, written as CSV or JSON with
//! every number rounded to 12 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Scalar results of the scan (worst margin, fitted exponent, ...).
    pub summary: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

impl ScanReport {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        ScanReport {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidInput(format!(
                "row has {} entries, report has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.summary.get(key).copied()
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Values of one column, by name.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Header row followed by one line per row; the summary is not included.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_sig(v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rounded = ScanReport {
            rows: self.rows.iter().map(|r| r.iter().map(|&v| round_sig(v)).collect()).collect(),
            summary: self.summary.iter().map(|(k, &v)| (k.clone(), round_sig(v))).collect(),
            ..self.clone()
        };
        let mut s = serde_json::to_string_pretty(&rounded).expect("report serializes");
        s.push('\n');
        s
    }
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest decimal text of `x` after rounding to 12 significant digits.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let r = round_sig(x);
        if r == 0.0 || (1e-4..1e15).contains(&r.abs()) {
            format!("{r}")
        } else {
            format!("{r:e}")
        }
    }
}
