//! Tabular output with a metadata header, written as CSV or JSON.
//!
//! CSV: `# key: value` comment lines (values in JSON notation), a header row,
//! then one row per record. Complex values are split into `re_*`/`im_*`
//! columns; missing values are empty fields.
//!
//! JSON: `{"meta": {...}, "records": [{column: value, ...}, ...]}` with
//! missing values as `null`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // Debug formatting of f64 is the shortest string that parses back
            // to the same value.
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// The two cells `Re z`, `Im z`, or two empty cells.
pub fn complex(z: Option<Complex64>) -> [Cell; 2] {
    match z {
        Some(z) => [Cell::Num(z.re), Cell::Num(z.im)],
        None => [Cell::Empty, Cell::Empty],
    }
}

/// Column names `re_<name>`, `im_<name>`.
pub fn complex_columns(name: &str) -> [String; 2] {
    [format!("re_{name}"), format!("im_{name}")]
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub meta: Map<String, Value>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct Document<'a> {
    meta: &'a Map<String, Value>,
    records: Vec<Map<String, Value>>,
}

impl Table {
    pub fn new(command: &str, columns: Vec<String>) -> Self {
        let mut meta = Map::new();
        meta.insert("artifact".into(), Value::from(env!("CARGO_PKG_NAME")));
        meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        meta.insert("command".into(), Value::from(command));
        Self { meta, columns, rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.insert(key.into(), value.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, out: impl Write, format: Format) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    /// Writes to `path`, or to stdout without one.
    pub fn emit(&self, path: Option<&Path>, format: Format) -> io::Result<()> {
        match path {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p)?);
                self.write_to(&mut w, format)?;
                w.flush()
            }
            None => self.write_to(io::stdout().lock(), format),
        }
    }

    fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()
    }

    fn write_json(&self, mut out: impl Write) -> io::Result<()> {
        let records = self
            .rows
            .iter()
            .map(|row| self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect())
            .collect();
        serde_json::to_writer_pretty(&mut out, &Document { meta: &self.meta, records })?;
        writeln!(out)
    }
}
