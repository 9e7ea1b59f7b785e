use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use gevrey_nets::io::{to_json_bytes, write_atomic};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_VERSION: u32 = 1;

/// A plot-ready table, written as CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.header.join(",")).unwrap();
        for r in &self.rows {
            writeln!(out, "{}", r.join(",")).unwrap();
        }
        out
    }
}

/// Shortest round-trip decimal, with `inf`/`-inf`/`nan` spelled out.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

/// One declared expectation and what the run produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: serde_json::Value,
    pub actual: serde_json::Value,
    pub ok: bool,
}

impl Check {
    pub fn new<T: Serialize + PartialEq>(name: &str, expected: &T, actual: &T) -> Self {
        Self {
            name: name.into(),
            expected: serde_json::to_value(expected).unwrap_or_default(),
            actual: serde_json::to_value(actual).unwrap_or_default(),
            ok: expected == actual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: String,
    pub status: &'static str,
    pub checks: Vec<Check>,
    pub result: serde_json::Value,
}

#[derive(Debug, Clone, Serialize)]
struct FileEntry {
    file: String,
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    manifest_version: u32,
    command: &'a str,
    config: &'a ExperimentConfig,
    inputs: Vec<FileEntry>,
    outputs: Vec<FileEntry>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

fn entry(file: &str, bytes: &[u8]) -> FileEntry {
    FileEntry { file: file.into(), bytes: bytes.len(), sha256: sha256_hex(bytes) }
}

/// Write `report.json`, the CSV tables and `MANIFEST.json` into `dir`, each atomically.
pub fn emit(
    dir: &Path,
    config: &ExperimentConfig,
    config_file: Option<&[u8]>,
    input_files: &[(String, Vec<u8>)],
    report: &Report,
    tables: &[(String, Table)],
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    let write = |name: &str, bytes: &[u8]| -> Result<FileEntry, CliError> {
        write_atomic(&dir.join(name), bytes).map_err(|e| CliError::Output(format!("{name}: {e}")))?;
        Ok(entry(name, bytes))
    };
    let mut outputs = vec![write("report.json", &to_json_bytes(report)?)?];
    for (name, table) in tables {
        outputs.push(write(name, table.to_csv().as_bytes())?);
    }
    let mut inputs = vec![entry("resolved-config", &to_json_bytes(config)?)];
    if let Some(bytes) = config_file {
        inputs.push(entry("config-file", bytes));
    }
    for (name, bytes) in input_files {
        inputs.push(entry(name, bytes));
    }
    let manifest = Manifest { manifest_version: MANIFEST_VERSION, command: &report.command, config, inputs, outputs };
    write("MANIFEST.json", &to_json_bytes(&manifest)?)?;
    Ok(())
}
