//! Run reports and atomic artifact writing.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// Failures listed in full in a report; the rest are only counted.
pub const MAX_LISTED_FAILURES: usize = 50;

#[derive(Debug, Serialize)]
pub struct Count {
    pub observed: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Value>,
}

/// Everything a command prints. Apart from `timings_ms` the report is a
/// function of the command line and its input files.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub seed: Option<u64>,
    pub counts: BTreeMap<String, Count>,
    pub failures: Vec<String>,
    pub failure_total: usize,
    pub artifacts: Vec<String>,
    pub timings_ms: BTreeMap<String, u128>,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunReport {
    pub fn new(command: &str, seed: Option<u64>) -> RunReport {
        RunReport {
            command: command.to_string(),
            seed,
            counts: BTreeMap::new(),
            failures: Vec::new(),
            failure_total: 0,
            artifacts: Vec::new(),
            timings_ms: BTreeMap::new(),
            started: Some(Instant::now()),
        }
    }

    pub fn observe(&mut self, key: &str, observed: impl Serialize) {
        self.counts.insert(key.to_string(), Count { observed: to_value(observed), expected: None });
    }

    /// Records a count with its expected value; a mismatch is a failure.
    pub fn expect<T: Serialize + PartialEq>(&mut self, key: &str, observed: T, expected: T) {
        if observed != expected {
            let (o, e) = (to_value(&observed), to_value(&expected));
            self.fail(format!("{key}: observed {o}, expected {e}"));
        }
        self.counts.insert(key.to_string(), Count { observed: to_value(observed), expected: Some(to_value(expected)) });
    }

    /// Records a count with its expected value; the caller reports the
    /// individual failures behind a mismatch.
    pub fn record<T: Serialize>(&mut self, key: &str, observed: T, expected: T) {
        self.counts.insert(key.to_string(), Count { observed: to_value(observed), expected: Some(to_value(expected)) });
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failure_total += 1;
        if self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(msg.into());
        }
    }

    pub fn ok(&self) -> bool {
        self.failure_total == 0
    }

    /// Runs `f` and records its wall time under `phase`.
    pub fn timed<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.timings_ms.insert(phase.to_string(), t.elapsed().as_millis());
        out
    }

    pub fn finish(&mut self) {
        if let Some(t) = self.started {
            self.timings_ms.insert("total".into(), t.elapsed().as_millis());
        }
    }

    pub fn artifact(&mut self, p: &Path) {
        self.artifacts.push(p.display().to_string());
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_json(path: &Path, v: &impl Serialize) -> std::io::Result<()> {
    let mut s = serde_json::to_string_pretty(v).map_err(std::io::Error::other)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}
