//! Deterministic CSV/JSON writers with a metadata header.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde_json::{Map, Value};

use crate::args::{Format, Output};

/// Round-trip formatting: 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Self::Int(i) => i.to_string(),
            Self::Num(x) => fmt_num(*x),
            Self::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Self::Int(i) => Value::from(*i),
            Self::Num(x) => Value::from(*x),
            Self::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Self::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Self::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_owned())
    }
}

/// Ordered run metadata: tool version, command and every input that
/// influences the output.
#[derive(Debug, Clone)]
pub struct Meta {
    entries: Vec<(String, String)>,
}

impl Meta {
    pub fn new(command: &str) -> Self {
        let mut m = Self {
            entries: Vec::new(),
        };
        m.push("tool", concat!("kg-galerkin ", env!("CARGO_PKG_VERSION")));
        m.push("command", command);
        m
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.entries.push((key.to_owned(), value.to_string()));
        self
    }

    pub fn num(&mut self, key: &str, x: f64) -> &mut Self {
        self.push(key, fmt_num(x))
    }

    fn to_json(&self) -> Value {
        Value::Object(
            self.entries
                .iter()
                .map(|(k, v)| (k.clone(), Value::from(v.as_str())))
                .collect(),
        )
    }
}

/// Column-oriented table. CSV gets one `#` line per metadata entry followed by
/// a header row; JSON maps each column name to an array.
#[derive(Debug, Clone, Default)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    fn render_csv(&self, meta: &Meta) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        for (k, v) in &meta.entries {
            buf.extend_from_slice(format!("# {k} = {v}\n").as_bytes());
        }
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv))?;
        }
        w.into_inner().context("flushing CSV buffer")
    }

    fn render_json(&self, meta: &Meta) -> Result<Vec<u8>> {
        let mut obj = Map::new();
        obj.insert("meta".into(), meta.to_json());
        for (i, name) in self.columns.iter().enumerate() {
            let col = self.rows.iter().map(|r| r[i].to_json()).collect();
            obj.insert(name.clone(), Value::Array(col));
        }
        render_value(&Value::Object(obj))
    }
}

fn render_value(v: &Value) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub struct Sink<'a> {
    out: &'a Output,
    written: Vec<PathBuf>,
}

impl<'a> Sink<'a> {
    pub fn new(out: &'a Output) -> Result<Self> {
        fs::create_dir_all(&out.out_dir)
            .with_context(|| format!("creating output directory {}", out.out_dir.display()))?;
        Ok(Self {
            out,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.out.out_dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    /// Write `stem.csv` or `stem.json` according to `--format`.
    pub fn table(&mut self, stem: &str, meta: &Meta, table: &Table) -> Result<()> {
        let bytes = match self.out.format {
            Format::Csv => table.render_csv(meta)?,
            Format::Json => table.render_json(meta)?,
        };
        self.write(&format!("{stem}.{}", self.out.format.extension()), &bytes)
    }

    /// Always CSV, for files meant to be read back (`--state-file`).
    pub fn csv(&mut self, stem: &str, meta: &Meta, table: &Table) -> Result<()> {
        self.write(&format!("{stem}.csv"), &table.render_csv(meta)?)
    }

    /// Always JSON: `meta` plus flat scalar/array entries.
    pub fn summary(&mut self, stem: &str, meta: &Meta, fields: Map<String, Value>) -> Result<()> {
        let mut obj = Map::new();
        obj.insert("meta".into(), meta.to_json());
        obj.extend(fields);
        self.write(&format!("{stem}.json"), &render_value(&Value::Object(obj))?)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

pub fn report_written(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}
