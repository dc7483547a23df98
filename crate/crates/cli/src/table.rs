//! CSV emission: comma separated, `.` decimal point, numbers rounded to nine
//! significant digits, `#`-prefixed header comments. Run metadata that varies
//! between runs goes to a `.meta.json` sidecar so the data file is byte-stable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Nine significant digits, shortest round-trip spelling; non-finite values are
/// left empty.
pub fn sig9(v: f64) -> String {
    if !v.is_finite() {
        return String::new();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{v:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => sig9(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.replace([',', '\n', '\r'], ";"),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { comments: Vec::new(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    /// Keeps every `k`-th row (and always the last one).
    pub fn decimate(&mut self, k: usize) {
        if k <= 1 || self.rows.is_empty() {
            return;
        }
        let last = self.rows.len() - 1;
        let rows = std::mem::take(&mut self.rows);
        self.rows = rows.into_iter().enumerate().filter(|(i, _)| i % k == 0 || *i == last).map(|(_, r)| r).collect();
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(path, self.to_csv()).map_err(|e| CliError::io(path, e))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub command: String,
    pub mode: String,
    pub rows: usize,
    pub flagged_rows: usize,
    pub generated_unix: u64,
    pub elapsed_seconds: f64,
}

pub fn meta_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn write_meta(csv: &Path, meta: &Meta) -> CliResult<()> {
    let path = meta_path(csv);
    let text = serde_json::to_string_pretty(meta).expect("meta serializes");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
}
