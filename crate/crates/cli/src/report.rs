// SPDX-License-Identifier: Apache-2.0

//! JSON-lines records and CSV plot tables.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

/// Names accepted by [`emit_plotdata`].
pub const TABLES: [&str; 4] = ["cue-decay", "due-decay", "beta-vs-eps", "growth"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub analysis: String,
    pub operation: String,
    pub graph: String,
    pub seed: u64,
    pub params: Value,
    pub result: Value,
    /// `None` for pure measurements.
    pub pass: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Keeps the row only if every entry is finite and, for log-log tables, positive.
    pub fn push(&mut self, row: Vec<f64>, positive: bool) {
        if row.iter().all(|v| v.is_finite() && (!positive || *v > 0.0)) {
            self.rows.push(row);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub header: Value,
    pub records: Vec<Record>,
    pub tables: BTreeMap<String, Table>,
}

impl Report {
    pub fn new(header: Value) -> Self {
        Self {
            header,
            records: Vec::new(),
            tables: BTreeMap::new(),
        }
    }

    pub fn failed(&self) -> Vec<&Record> {
        self.records
            .iter()
            .filter(|r| r.pass == Some(false))
            .collect()
    }

    /// 0 when no check failed, 2 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.failed().is_empty() {
            0
        } else {
            2
        }
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = serde_json::to_string(&self.header)?;
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl()?)
            .map_err(|e| CliError::io(format!("writing {}", path.display()), e))
    }

    /// One line per record with a check or a headline value.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let status = match r.pass {
                Some(true) => "PASS",
                Some(false) => "FAIL",
                None => "----",
            };
            s.push_str(&format!("{status} {}/{}\n", r.analysis, r.operation));
        }
        let failed = self.failed().len();
        s.push_str(&format!(
            "{} records, {failed} failed\n",
            self.records.len()
        ));
        s
    }

    pub fn table_csv(&self, name: &str) -> Result<String> {
        if !TABLES.contains(&name) {
            return Err(CliError::UnknownTable(name.into(), TABLES.join(", ")));
        }
        let table = self
            .tables
            .get(name)
            .filter(|t| !t.rows.is_empty())
            .ok_or_else(|| CliError::EmptyTable(name.into()))?;
        let seed = self.header.get("seed").cloned().unwrap_or(Value::Null);
        let graph = self
            .header
            .get("graph")
            .and_then(Value::as_str)
            .unwrap_or("");
        let mut out = format!("# ultracon table={name} graph={graph} seed={seed}\n");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|v| format!("{v:?}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::io("writing csv", e.into_error()))?;
        out.push_str(&String::from_utf8_lossy(&bytes));
        Ok(out)
    }
}

/// Writes `<dir>/<name>.csv` and returns its path.
pub fn emit_plotdata(report: &Report, name: &str, dir: &Path) -> Result<PathBuf> {
    let text = report.table_csv(name)?;
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let path = dir.join(format!("{name}.csv"));
    std::fs::write(&path, text)
        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    Ok(path)
}
