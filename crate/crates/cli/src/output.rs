//! Deterministic CSV/JSON emission and companion gnuplot scripts.

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Real(_) | Cell::Missing => "nan".into(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) if v.is_finite() => json!(v),
            Cell::Real(_) | Cell::Missing => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Real)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    fn csv_body(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        json!({ "columns": self.columns, "rows": rows })
    }
}

/// A finished result: header metadata, the main table, and extra sections
/// that go into `#` lines for CSV and into `data` for JSON.
pub struct Document {
    pub meta: Map<String, Value>,
    pub table: Table,
    pub extra: Map<String, Value>,
}

impl Document {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut s = String::new();
                for (k, v) in &self.meta {
                    writeln!(s, "# {k}: {}", scalar(v)).unwrap();
                }
                for (k, v) in &self.extra {
                    writeln!(s, "# {k}: {v}").unwrap();
                }
                s.push_str(&self.table.csv_body());
                s
            }
            Format::Json => {
                let mut data = self.extra.clone();
                data.insert("table".into(), self.table.to_json());
                let doc = json!({ "meta": self.meta, "data": data });
                let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Gnuplot script drawing each `using ...` clause from a CSV data file.
///
/// Meant to be run from the directory holding the data file.
pub fn gnuplot_script(data_file: &Path, script: &str, settings: &[String], clauses: &[String]) -> String {
    let name = data_file.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut s = String::new();
    writeln!(s, "# run from the directory holding {name}: gnuplot -p gnuplot/{script}").unwrap();
    s.push_str("set datafile separator ','\n");
    s.push_str("set datafile commentschars '#'\n");
    s.push_str("set key autotitle columnhead\n");
    for line in settings {
        writeln!(s, "{line}").unwrap();
    }
    let parts: Vec<String> = clauses.iter().map(|c| format!("'{name}' {c}")).collect();
    writeln!(s, "plot {}", parts.join(", \\\n     ")).unwrap();
    s
}
