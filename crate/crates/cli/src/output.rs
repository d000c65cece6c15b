//! Output files. Every file starts with the schema version and the hash of
//! the inputs that produced it.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::SCHEMA_VERSION;

/// Provenance of one run.
#[derive(Debug, Clone)]
pub struct Header {
    pub command: &'static str,
    pub config_sha256: String,
    pub seed: u64,
}

impl Header {
    /// Hash over the config file bytes, any extra input files, the command
    /// and the effective seed.
    pub fn new(command: &'static str, config: &[u8], extra: &[&[u8]], seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update((config.len() as u64).to_le_bytes());
        h.update(config);
        for e in extra {
            h.update((e.len() as u64).to_le_bytes());
            h.update(e);
        }
        h.update(command.as_bytes());
        h.update(seed.to_le_bytes());
        Self {
            command,
            config_sha256: hex::encode(h.finalize()),
            seed,
        }
    }

    pub fn comment(&self) -> String {
        format!(
            "pas schema_version={SCHEMA_VERSION} command={} seed={} config_sha256={}",
            self.command, self.seed, self.config_sha256
        )
    }

    fn json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "seed": self.seed,
            "config_sha256": self.config_sha256,
        })
    }
}

/// A table with frozen column order. Missing values are empty cells in CSV
/// and `null` in JSON.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

fn cell(v: Option<f64>) -> String {
    match v {
        None => String::new(),
        Some(x) if x.fract() == 0.0 && x.abs() < 1e15 => format!("{x:.0}"),
        Some(x) => format!("{x:e}"),
    }
}

pub fn write_csv(path: &Path, header: &Header, table: &Table) -> Result<()> {
    let mut out = format!("# {}\n", header.comment()).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|&v| cell(v)))?;
        }
        w.flush()?;
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// JSON document `{header, ...body}`; a table body is stored as
/// `columns` plus row arrays so that column order survives.
pub fn write_json(
    path: &Path,
    header: &Header,
    body: impl Serialize,
    table: Option<&Table>,
) -> Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("header".into(), header.json());
    if let Value::Object(m) = serde_json::to_value(body)? {
        doc.extend(m);
    }
    if let Some(t) = table {
        doc.insert("columns".into(), json!(t.columns));
        doc.insert("rows".into(), json!(t.rows));
    }
    let text = serde_json::to_string_pretty(&Value::Object(doc))? + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn out_path(dir: &Path, name: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.join(name))
}
