//! Artifact writing: every payload carries the config and its own hash, and
//! wall-clock data lives only in the `run.meta.json` sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

pub const CHECKS_FILE: &str = "checks.json";
pub const META_FILE: &str = "run.meta.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    /// Acceptance criterion this check reproduces, if any.
    pub criterion: Option<u8>,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(criterion: Option<u8>, name: &str, passed: bool, detail: String) -> Self {
        Self { criterion, name: name.to_string(), passed, detail }
    }
}

/// What an experiment produced, before anything touches the disk.
#[derive(Default)]
pub struct RunOutput {
    pub tables: Vec<(String, String)>,
    pub documents: Vec<(String, Value)>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl RunOutput {
    pub fn table(&mut self, name: impl Into<String>, csv: String) {
        self.tables.push((name.into(), csv));
    }

    pub fn document(&mut self, name: impl Into<String>, value: Value) {
        self.documents.push((name.into(), value));
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// CSV with two comment lines: the config, then the hash of the table body.
pub fn csv_artifact(cfg: &ExperimentConfig, body: &str) -> String {
    format!("# config {}\n# sha256 {}\n{}", cfg.canonical(), sha256_hex(body.as_bytes()), body)
}

/// JSON wrapper; the hash covers the compact serialization of `result`.
pub fn json_artifact(cfg: &ExperimentConfig, result: &Value) -> Result<String> {
    let compact = serde_json::to_string(result)?;
    let doc = json!({ "config": cfg.to_json(), "sha256": sha256_hex(compact.as_bytes()), "result": result });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Writes everything under `cfg.out` and returns the summary text.
pub fn persist(cfg: &ExperimentConfig, run: &RunOutput, started: chrono::DateTime<chrono::Utc>) -> Result<String> {
    let dir = &cfg.out;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut hashes = Vec::new();
    for (name, body) in &run.tables {
        write(dir, name, &csv_artifact(cfg, body))?;
        hashes.push(json!({ "file": name, "sha256": sha256_hex(body.as_bytes()) }));
    }
    for (name, value) in &run.documents {
        write(dir, name, &json_artifact(cfg, value)?)?;
        hashes.push(json!({ "file": name, "sha256": sha256_hex(serde_json::to_string(value)?.as_bytes()) }));
    }
    let checks = json!({ "experiment": cfg.experiment.name(), "checks": run.checks });
    write(dir, CHECKS_FILE, &json_artifact(cfg, &checks)?)?;

    let mut summary = format!("{}\n", cfg.canonical());
    for n in &run.notes {
        summary.push_str(&format!("  {n}\n"));
    }
    for c in &run.checks {
        let id = c.criterion.map(|k| format!("[{k:>2}] ")).unwrap_or_default();
        summary.push_str(&format!("{} {id}{}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
    }
    write(dir, "summary.txt", &summary)?;

    let meta = json!({
        "experiment": cfg.experiment.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "started": started.to_rfc3339(),
        "finished": chrono::Utc::now().to_rfc3339(),
        "files": hashes,
    });
    write(dir, META_FILE, &(serde_json::to_string_pretty(&meta)? + "\n"))?;
    Ok(summary)
}

/// Reads the `checks` array back out of a `checks.json` artifact.
pub fn read_checks(path: &Path) -> Result<(String, Vec<Check>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let result = doc.get("result").with_context(|| format!("{}: no `result` field", path.display()))?;
    let experiment = result.get("experiment").and_then(Value::as_str).unwrap_or("?").to_string();
    let checks = serde_json::from_value(result.get("checks").cloned().unwrap_or(Value::Null))
        .with_context(|| format!("{}: malformed `checks`", path.display()))?;
    Ok((experiment, checks))
}
