//! Flat result tables written as CSV or JSON lines.

use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value as Json};

use crate::error::{Error, Result};

/// Bumped whenever a column set changes.
pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Null,
}

impl Value {
    fn csv_field(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(f) => match Number::from_f64(*f) {
                Some(n) => n.to_string(),
                None => f.to_string().to_lowercase(),
            },
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
            Value::Null => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Int(i) => Json::from(*i),
            Value::Float(f) => Number::from_f64(*f).map(Json::Number).unwrap_or(Json::Null),
            Value::Bool(b) => Json::Bool(*b),
            Value::Text(s) => Json::String(s.clone()),
            Value::Null => Json::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(f) => Some(*f),
            _ => None,
        }
    }
}

macro_rules! value_from {
    ($($t:ty => $arm:ident as $conv:ty),* $(,)?) => {
        $(impl From<$t> for Value {
            fn from(v: $t) -> Self {
                Value::$arm(v as $conv)
            }
        })*
    };
}

value_from!(i64 => Int as i64, i32 => Int as i64, u32 => Int as i64, usize => Int as i64, u64 => Int as i64, f64 => Float as f64);

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map(Into::into).unwrap_or(Value::Null)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" | "jsonlines" | "json" => Ok(Format::JsonLines),
            other => Err(Error::Config(format!("unknown format {other:?} (csv or jsonl)"))),
        }
    }
}

/// Rows sharing one column set; `schema_version` is always the first column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        let mut all = vec!["schema_version".to_string()];
        all.extend(columns.iter().map(|c| c.to_string()));
        Self { columns: all, rows: Vec::new() }
    }

    /// Appends a row given as (column, value) pairs in column order.
    pub fn push(&mut self, record: Vec<(&str, Value)>) {
        assert_eq!(record.len() + 1, self.columns.len(), "row width differs from header");
        let mut row = vec![Value::Int(SCHEMA_VERSION as i64)];
        for ((name, value), col) in record.into_iter().zip(&self.columns[1..]) {
            assert_eq!(name, col, "column order mismatch");
            row.push(value);
        }
        self.rows.push(row);
    }

    /// Builds a table whose header is taken from the first record.
    pub fn from_records(records: Vec<Vec<(&str, Value)>>) -> Self {
        let names: Vec<&str> = records.first().map(|r| r.iter().map(|(n, _)| *n).collect()).unwrap_or_default();
        let mut t = Table::new(&names);
        for r in records {
            t.push(r);
        }
        t
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Value>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn get(&self, row: usize, column: &str) -> Option<&Value> {
        self.column_index(column).and_then(|c| self.rows.get(row).map(|r| &r[c]))
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
                w.write_record(&self.columns).map_err(csv_error)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Value::csv_field)).map_err(csv_error)?;
                }
                w.into_inner().map_err(|e| Error::Io(e.into_error()))
            }
            Format::JsonLines => {
                let mut out = Vec::new();
                for row in &self.rows {
                    let obj: Map<String, Json> = self.columns.iter().cloned().zip(row.iter().map(Value::json)).collect();
                    serde_json::to_writer(&mut out, &obj).map_err(|e| Error::Io(e.into()))?;
                    out.push(b'\n');
                }
                Ok(out)
            }
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes `bytes` to a temporary file beside `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
