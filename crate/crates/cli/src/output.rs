use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::manifest::RunManifest;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Num(f64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

/// Shortest round-trip text; exponent form outside `[1e-4, 1e6)`.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == 0.0 || (1e-4..1e6).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Value {
    fn tsv(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Num(x) => format_f64(*x),
            Value::Bool(b) => u8::from(*b).to_string(),
            Value::Text(s) => s.replace(['\t', '\n'], " "),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    #[serde(skip)]
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_columns(name: &str, columns: Vec<String>) -> Self {
        Table { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything one command produces.
#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    pub summary: BTreeMap<String, Value>,
    pub tables: Vec<Table>,
}

impl CommandOutput {
    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Tsv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Json => "json",
        }
    }
}

/// File names written for `command` in `format`.
pub fn output_names(command: &str, format: Format, out: &CommandOutput) -> Vec<String> {
    let stem = command.replace('-', "_");
    match format {
        Format::Json => vec![format!("{stem}.json")],
        Format::Tsv => {
            let mut names: Vec<String> = out.tables.iter().map(|t| format!("{}.tsv", t.name)).collect();
            names.push(format!("{stem}_summary.tsv"));
            names
        }
    }
}

fn tsv_body(header: &str, columns: &[String], rows: &[Vec<Value>]) -> String {
    let mut s = String::from(header);
    let _ = writeln!(s, "{}", columns.join("\t"));
    for row in rows {
        let cells: Vec<String> = row.iter().map(Value::tsv).collect();
        let _ = writeln!(s, "{}", cells.join("\t"));
    }
    s
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    manifest: &'a RunManifest,
    summary: &'a BTreeMap<String, Value>,
    tables: BTreeMap<&'a str, &'a Table>,
}

/// Writes all outputs into `dir` and returns their paths.
pub fn write_outputs(dir: &Path, manifest: &RunManifest, out: &CommandOutput) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let mut files: Vec<(String, String)> = Vec::new();
    match manifest.format {
        Format::Json => {
            let doc = JsonDocument {
                manifest,
                summary: &out.summary,
                tables: out.tables.iter().map(|t| (t.name.as_str(), t)).collect(),
            };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            files.push((manifest.outputs[0].clone(), text));
        }
        Format::Tsv => {
            let header = manifest.header();
            for (table, name) in out.tables.iter().zip(&manifest.outputs) {
                files.push((name.clone(), tsv_body(&header, &table.columns, &table.rows)));
            }
            let rows: Vec<Vec<Value>> =
                out.summary.iter().map(|(k, v)| vec![Value::Text(k.clone()), v.clone()]).collect();
            let name = manifest.outputs.last().expect("summary file name").clone();
            files.push((name, tsv_body(&header, &["key".into(), "value".into()], &rows)));
        }
    }
    let mut paths = Vec::new();
    for (name, text) in files {
        let path = dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1e-12, 3.0, -2.5e7, 123456.789, 1.0 / 3.0, 0.0] {
            assert_eq!(format_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_f64(1e-12), "1e-12");
        assert_eq!(format_f64(0.25), "0.25");
    }
}
