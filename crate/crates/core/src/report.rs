//! Deterministic report emission: CSV or JSON lines, stable column order,
//! floats with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}
impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}
impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}
impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(v as i64)
    }
}
impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}
impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}
impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}
impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Str(v)
    }
}

/// One report row: ordered (column, value) pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(String, Value)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, key: &str, value: impl Into<Value>) {
        self.0.push((key.to_string(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn keys(&self) -> Vec<&str> {
        self.0.iter().map(|(k, _)| k.as_str()).collect()
    }
}

/// 17 significant digits in scientific notation; non-finite values spelled out.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Float(f) => fmt_f64(*f),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
    }
}

fn json_value(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        // JSON has no non-finite numbers; those become strings.
        Value::Float(f) if f.is_finite() => fmt_f64(*f),
        Value::Float(f) => serde_json::to_string(&fmt_f64(*f)).expect("string serializes"),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => serde_json::to_string(s).expect("string serializes"),
    }
}

/// Renders records. The config, when given, is echoed as the first line
/// (`# config: {...}` in CSV, `{"config": {...}}` in JSON lines).
pub fn render(records: &[Record], format: Format, config: Option<&serde_json::Value>, header: Option<&[&str]>) -> Result<String> {
    let columns: Vec<String> = match (records.first(), header) {
        (Some(r), _) => r.keys().into_iter().map(String::from).collect(),
        (None, Some(h)) => h.iter().map(|s| s.to_string()).collect(),
        (None, None) => Vec::new(),
    };
    for (i, r) in records.iter().enumerate() {
        if r.keys() != columns {
            return Err(Error::Internal(format!("report row {i} has columns {:?}, expected {columns:?}", r.keys())));
        }
    }
    let mut out = String::new();
    match format {
        Format::Csv => {
            if let Some(c) = config {
                writeln!(out, "# config: {c}").unwrap();
            }
            if !columns.is_empty() {
                writeln!(out, "{}", columns.join(",")).unwrap();
            }
            for r in records {
                let row: Vec<String> = r.0.iter().map(|(_, v)| csv_field(v)).collect();
                writeln!(out, "{}", row.join(",")).unwrap();
            }
        }
        Format::Jsonl => {
            if let Some(c) = config {
                writeln!(out, "{{\"config\":{c}}}").unwrap();
            }
            for r in records {
                let body: Vec<String> = r
                    .0
                    .iter()
                    .map(|(k, v)| format!("{}:{}", serde_json::to_string(k).unwrap(), json_value(v)))
                    .collect();
                writeln!(out, "{{{}}}", body.join(",")).unwrap();
            }
        }
    }
    Ok(out)
}

pub fn emit_report(
    records: &[Record],
    format: Format,
    path: &Path,
    config: Option<&serde_json::Value>,
    header: Option<&[&str]>,
) -> Result<()> {
    let text = render(records, format, config, header)?;
    std::fs::write(path, text).map_err(Error::Io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_only_csv() {
        let s = render(&[], Format::Csv, None, Some(&["a", "b"])).unwrap();
        assert_eq!(s, "a,b\n");
    }

    #[test]
    fn floats_keep_all_digits() {
        let r = Record::new().with("x", 0.1 + 0.2).with("k", 3u64);
        let s = render(&[r], Format::Jsonl, None, None).unwrap();
        let v: serde_json::Value = serde_json::from_str(s.trim()).unwrap();
        assert_eq!(v["x"].as_f64().unwrap(), 0.1 + 0.2);
        assert!(s.starts_with("{\"x\":"));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let rows = [Record::new().with("a", 1u64), Record::new().with("b", 1u64)];
        assert!(render(&rows, Format::Csv, None, None).is_err());
    }
}
