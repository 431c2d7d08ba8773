//! CSV output with a `#`-prefixed metadata header.
//!
//! ```text
//! # qfriction 0.1.0
//! # scenario: omega_a=... alpha0=... ...
//! omega,energy,...
//! 0.000000000000e0,...
//! ```

use std::io::Write;

use crate::error::{Error, Result};
use crate::units::Scenario;

/// A cell: numbers are written in fixed 13-significant-digit exponent form
/// so output is byte-reproducible.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => format!("{x:.12e}"),
            Cell::Num(x) => format!("{x}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Metadata lines for a run: library version, scenario and any extras.
pub fn metadata(scenario: &Scenario, extra: &[(&str, String)]) -> Vec<String> {
    let mut lines = vec![
        format!("qfriction {}", crate::VERSION),
        format!("scenario: {scenario}"),
    ];
    lines.extend(extra.iter().map(|(k, v)| format!("{k}: {v}")));
    lines
}

pub struct CsvWriter<W: Write> {
    inner: csv::Writer<W>,
    width: usize,
}

impl<W: Write> CsvWriter<W> {
    /// Writes the comment header and the column names.
    pub fn new(mut out: W, meta: &[String], columns: &[&str]) -> Result<Self> {
        for line in meta {
            for part in line.lines() {
                writeln!(out, "# {part}")?;
            }
        }
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(columns).map_err(csv_error)?;
        Ok(CsvWriter {
            inner,
            width: columns.len(),
        })
    }

    pub fn row(&mut self, cells: &[Cell]) -> Result<()> {
        if cells.len() != self.width {
            return Err(Error::validation(
                "csv row",
                format!("expected {} cells, got {}", self.width, cells.len()),
            ));
        }
        self.inner
            .write_record(cells.iter().map(Cell::render))
            .map_err(csv_error)
    }

    pub fn numbers(&mut self, values: &[f64]) -> Result<()> {
        let cells: Vec<Cell> = values.iter().map(|&x| Cell::Num(x)).collect();
        self.row(&cells)
    }

    pub fn finish(self) -> Result<W> {
        self.inner
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}
