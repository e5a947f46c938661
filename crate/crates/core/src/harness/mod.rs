//! Report tables and the commands behind the CLI.

mod commands;
mod config;
mod verify;

pub use commands::{
    bound_report, compare, constants_table, cutoff_table, load_or_build_spectrum, spectrum_cache_path,
    CompareOptions, CompareReport, SPECTRUM_CACHE_ENV,
};
pub use config::{Geometry, Sampling, SweepConfig};
pub use verify::{run_sweep, RowStatus, SweepReport, VerifySummary, PASS_TOLERANCE};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::domain("Format", format!("unknown format {s:?} (expected csv or json)"))),
        }
    }
}

/// The bound families selectable with `--thm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    Thm11,
    Thm22,
    Dirichlet,
    VdbHull,
    VdbDiag,
    VdbOffdiag,
    Neumann41,
}

impl BoundKind {
    pub const ALL: [BoundKind; 7] = [
        BoundKind::Thm11,
        BoundKind::Thm22,
        BoundKind::Dirichlet,
        BoundKind::VdbHull,
        BoundKind::VdbDiag,
        BoundKind::VdbOffdiag,
        BoundKind::Neumann41,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Thm11 => "11",
            BoundKind::Thm22 => "22",
            BoundKind::Dirichlet => "dirichlet",
            BoundKind::VdbHull => "vdb-hull",
            BoundKind::VdbDiag => "vdb-diag",
            BoundKind::VdbOffdiag => "vdb-offdiag",
            BoundKind::Neumann41 => "neumann41",
        }
    }

    /// Whether the bound holds only for the Dirichlet extension.
    pub fn dirichlet_only(self) -> bool {
        matches!(self, BoundKind::Dirichlet | BoundKind::VdbHull | BoundKind::VdbDiag | BoundKind::VdbOffdiag)
    }

    /// Column-safe form of the name.
    fn column(self) -> String {
        match self {
            BoundKind::Thm11 => "thm11".into(),
            BoundKind::Thm22 => "thm22".into(),
            other => other.name().replace('-', "_"),
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::domain("BoundKind", format!("unknown bound {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

/// Floats are written with 17 significant digits so values round-trip.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => format_float(*f),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(f) => serde_json::Number::from_f64(*f).map(Value::Number).unwrap_or(Value::Null),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

/// A report with a fixed column order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Array of objects whose keys follow the column order.
    pub fn to_json(&self) -> Result<String> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> =
                    self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}
