//! Benchmark report rows and their CSV / JSON encodings.
//!
//! Cells an engine could not fill (cap failure, engine not run) are `-` in CSV
//! and `null` in JSON.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CSV_HEADER: [&str; 10] = [
    "n",
    "arcs",
    "n_all",
    "n_feasible",
    "reliability",
    "t_bat_s",
    "t_ugfm_s",
    "visited_bat",
    "generated_ugfm",
    "delta",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub arcs: usize,
    pub n_all: u128,
    pub n_feasible: Option<u64>,
    pub reliability: Option<f64>,
    pub t_bat_s: Option<f64>,
    pub t_ugfm_s: Option<f64>,
    pub visited_bat: Option<u64>,
    pub generated_ugfm: Option<u64>,
    /// `|R_bat - R_ugfm|` when both engines finished.
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unexpected CSV header {0:?}")]
    Header(Vec<String>),
    #[error("row {row}: cannot parse column {column} from {value:?}")]
    Cell {
        row: usize,
        column: &'static str,
        value: String,
    },
}

/// Rounds a duration in seconds to microsecond resolution.
pub fn micros(seconds: f64) -> f64 {
    (seconds * 1e6).round() / 1e6
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

fn opt_secs(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

fn cell<T: std::str::FromStr>(
    record: &csv::StringRecord,
    row: usize,
    idx: usize,
) -> Result<Option<T>, ReportError> {
    let raw = record.get(idx).unwrap_or("");
    if raw == "-" {
        return Ok(None);
    }
    raw.parse().map(Some).map_err(|_| ReportError::Cell {
        row,
        column: CSV_HEADER[idx],
        value: raw.to_string(),
    })
}

fn required<T: std::str::FromStr>(
    record: &csv::StringRecord,
    row: usize,
    idx: usize,
) -> Result<T, ReportError> {
    cell(record, row, idx)?.ok_or_else(|| ReportError::Cell {
        row,
        column: CSV_HEADER[idx],
        value: "-".to_string(),
    })
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                r.arcs.to_string(),
                r.n_all.to_string(),
                opt(r.n_feasible),
                opt(r.reliability),
                opt_secs(r.t_bat_s),
                opt_secs(r.t_ugfm_s),
                opt(r.visited_bat),
                opt(r.generated_ugfm),
                opt(r.delta),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Self, ReportError> {
        let mut rd = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header = rd.headers()?.clone();
        if header.iter().ne(CSV_HEADER) {
            return Err(ReportError::Header(
                header.iter().map(String::from).collect(),
            ));
        }
        let mut rows = Vec::new();
        for (k, rec) in rd.records().enumerate() {
            let rec = rec?;
            rows.push(BenchRow {
                n: required(&rec, k, 0)?,
                arcs: required(&rec, k, 1)?,
                n_all: required(&rec, k, 2)?,
                n_feasible: cell(&rec, k, 3)?,
                reliability: cell(&rec, k, 4)?,
                t_bat_s: cell(&rec, k, 5)?,
                t_ugfm_s: cell(&rec, k, 6)?,
                visited_bat: cell(&rec, k, 7)?,
                generated_ugfm: cell(&rec, k, 8)?,
                delta: cell(&rec, k, 9)?,
            });
        }
        Ok(BenchReport { rows })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("rows serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(BenchReport {
            rows: serde_json::from_str(text)?,
        })
    }

    /// Aligned plain-text table for terminals.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{:>3} {:>4} {:>16} {:>14} {:>10} {:>12} {:>12} {:>16} {:>14} {:>10}\n",
            "|V|", "|E|", "N_all", "N", "R", "T_BAT", "T_UGFM", "N_BAT", "N_UGFM", "delta"
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>3} {:>4} {:>16} {:>14} {:>10} {:>12} {:>12} {:>16} {:>14} {:>10}\n",
                r.n,
                r.arcs,
                r.n_all,
                opt(r.n_feasible),
                r.reliability.map_or("-".into(), |v| format!("{v:.6}")),
                opt_secs(r.t_bat_s),
                r.t_ugfm_s.map_or("N/A".into(), |v| format!("{v:.6}")),
                opt(r.visited_bat),
                r.generated_ugfm.map_or("N/A".into(), |v| v.to_string()),
                r.delta.map_or("-".into(), |v| format!("{v:.1e}")),
            ));
        }
        out
    }
}
