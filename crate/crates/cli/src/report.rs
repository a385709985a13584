//! Verdicts, their one-line summaries, and the files every suite writes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Outcome of one check. `tag` names the identity or statement checked.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub tag: String,
    pub check: String,
    pub pass: bool,
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

impl Verdict {
    pub fn new(tag: &str, check: &str, pass: bool, value: f64, bound: f64, detail: impl Into<String>) -> Self {
        Verdict { tag: tag.into(), check: check.into(), pass, value, bound, detail: detail.into() }
    }

    /// `value ≤ bound`.
    pub fn at_most(tag: &str, check: &str, value: f64, bound: f64) -> Self {
        Self::new(tag, check, value <= bound, value, bound, String::new())
    }

    pub fn line(&self) -> String {
        let mut s = format!(
            "{} [{}] {}: {:.6e} (bound {:.6e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.tag,
            self.check,
            self.value,
            self.bound
        );
        if !self.detail.is_empty() {
            s.push_str(" ");
            s.push_str(&self.detail);
        }
        s
    }
}

/// Everything one suite produced.
#[derive(Debug, Default)]
pub struct SuiteReport {
    pub suite: String,
    pub verdicts: Vec<Verdict>,
    /// Scalar results that are reported without a pass/fail bound.
    pub metrics: Map<String, Value>,
    pub files: Vec<PathBuf>,
    pub not_converged: Option<String>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.into(), ..Default::default() }
    }

    pub fn push(&mut self, v: Verdict) {
        println!("{}", v.line());
        self.verdicts.push(v);
    }

    pub fn metric(&mut self, key: &str, value: impl Into<Value>) {
        self.metrics.insert(key.into(), value.into());
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Write `<suite>.json` with the verdicts and metrics.
    pub fn write(&mut self, out: &Path) -> Result<(), CliError> {
        let path = out.join(format!("{}.json", self.suite));
        let mut root = Map::new();
        root.insert("suite".into(), Value::String(self.suite.clone()));
        root.insert("verdicts".into(), serde_json::to_value(&self.verdicts).map_err(io_json)?);
        root.insert("metrics".into(), Value::Object(self.metrics.clone()));
        if let Some(msg) = &self.not_converged {
            root.insert("not_converged".into(), Value::String(msg.clone()));
        }
        write_json(&path, &Value::Object(root))?;
        self.files.push(path);
        Ok(())
    }
}

fn io_json(e: serde_json::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?);
    serde_json::to_writer_pretty(&mut w, value).map_err(io_json)?;
    writeln!(w).map_err(|e| CliError::Io(e.to_string()))?;
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// A CSV file with a fixed header.
pub struct Csv {
    path: PathBuf,
    inner: csv::Writer<BufWriter<File>>,
}

impl Csv {
    pub fn create(path: PathBuf, header: &[&str]) -> Result<Self, CliError> {
        let file = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut inner = csv::Writer::from_writer(BufWriter::new(file));
        inner.write_record(header).map_err(csv_err)?;
        Ok(Csv { path, inner })
    }

    pub fn row(&mut self, values: &[f64]) -> Result<(), CliError> {
        self.inner.write_record(values.iter().map(|v| v.to_string())).map_err(csv_err)
    }

    pub fn record(&mut self, fields: &[String]) -> Result<(), CliError> {
        self.inner.write_record(fields).map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.inner.flush().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(self.path)
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}
