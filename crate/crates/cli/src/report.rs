//! Reports and their canonical serialization.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use ncalc::jet::io::terms_to_json;
use ncalc::jet::{MatrixSeries, TruncatedSeries};

/// Errors that end a command before a report exists (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl UsageError {
    pub fn new(msg: impl Into<String>) -> Self {
        UsageError(msg.into())
    }
}

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

pub type CmdResult = Result<Report, UsageError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Untestable,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Untestable => 3,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Untestable => "untestable",
        }
    }
}

/// A loaded input file.
pub struct Input {
    pub path: PathBuf,
    pub text: String,
}

pub struct Report {
    command: String,
    started: Instant,
    inputs: Map<String, Value>,
    pub outcome: Outcome,
    reason: Option<String>,
    result: Map<String, Value>,
    witnesses: Vec<Value>,
    seed: Option<u64>,
}

impl Report {
    pub fn new(command: String) -> Self {
        Report {
            command,
            started: Instant::now(),
            inputs: Map::new(),
            outcome: Outcome::Pass,
            reason: None,
            result: Map::new(),
            witnesses: Vec::new(),
            seed: None,
        }
    }

    /// Reads `path` and records its digest under `role`.
    pub fn load(&mut self, role: &str, path: &Path) -> Result<Input, UsageError> {
        let bytes = std::fs::read(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
        let digest = hex::encode(Sha256::digest(&bytes));
        self.inputs.insert(
            role.to_string(),
            json!({"path": path.display().to_string(), "sha256": digest}),
        );
        let text = String::from_utf8(bytes).map_err(|_| UsageError(format!("{}: not UTF-8", path.display())))?;
        Ok(Input {
            path: path.to_path_buf(),
            text,
        })
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.result.insert(key.to_string(), v);
    }

    pub fn witness(&mut self, w: Value) {
        self.witnesses.push(w);
    }

    pub fn fail_if(&mut self, bad: bool) {
        if bad && self.outcome == Outcome::Pass {
            self.outcome = Outcome::Fail;
        }
    }

    pub fn untestable(mut self, reason: impl Into<String>) -> Self {
        self.outcome = Outcome::Untestable;
        self.reason = Some(reason.into());
        self
    }

    pub fn seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn render(&self) -> String {
        let mut top = Map::new();
        top.insert("command".into(), Value::from(self.command.clone()));
        top.insert("inputs".into(), Value::Object(self.inputs.clone()));
        top.insert("outcome".into(), Value::from(self.outcome.as_str()));
        if let Some(r) = &self.reason {
            top.insert("reason".into(), Value::from(r.clone()));
        }
        top.insert("result".into(), Value::Object(self.result.clone()));
        top.insert("witnesses".into(), Value::Array(self.witnesses.clone()));
        if let Some(s) = self.seed {
            top.insert("seed".into(), Value::from(s));
        }
        if std::env::var_os("NCALC_TIMING").is_some() {
            top.insert("timing_ms".into(), Value::from(self.started.elapsed().as_millis() as u64));
        }
        canonical(&Value::Object(top))
    }
}

/// `serde_json` maps are ordered by key, so this is canonical as long as
/// values never hold floats.
pub fn canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

pub fn canonical_of(v: impl Serialize) -> String {
    canonical(&serde_json::to_value(v).expect("values serialize"))
}

/// `"0"` for the zero series, else its term list.
pub fn series(s: &TruncatedSeries) -> Value {
    if s.is_zero() {
        Value::from("0")
    } else {
        serde_json::to_value(terms_to_json(s)).expect("terms serialize")
    }
}

pub fn point(p: &[TruncatedSeries]) -> Value {
    if p.iter().all(TruncatedSeries::is_zero) {
        Value::from("0")
    } else {
        Value::Array(p.iter().map(series).collect())
    }
}

pub fn matrix(m: &MatrixSeries) -> Value {
    if m.is_zero() {
        return Value::from("0");
    }
    let rows = (0..m.rows())
        .map(|i| Value::Array((0..m.cols()).map(|j| series(m.get(i, j))).collect()))
        .collect();
    Value::Array(rows)
}
