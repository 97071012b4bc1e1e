//! Collates `checks.json` files from finished runs against criteria 1–13.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use crate::output::{read_checks, Check, CHECKS_FILE};

pub const CRITERIA: [&str; 13] = [
    "Eguchi-Hanson Ricci-flat",
    "Burns scalar-flat, not Einstein",
    "cutoff curvature decays like ε²",
    "volume deficits",
    "collapsing bundles",
    "glued collapse certificate",
    "conformal transformation law",
    "Hölder and flat-case inequalities",
    "Yamabe descent on flat T⁴",
    "characteristic-class conventions",
    "∫|W₊|² along the collapse",
    "surface classifier",
    "sphere Yamabe constants",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "SKIPPED")]
    Skipped,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CriterionLine {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    pub details: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub runs: Vec<String>,
    pub criteria: Vec<CriterionLine>,
    /// Checks not tied to a criterion.
    pub extra: Vec<Check>,
}

impl Report {
    pub fn any_failed(&self) -> bool {
        self.criteria.iter().any(|c| c.status == Status::Fail) || self.extra.iter().any(|c| !c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("runs: {}\n", self.runs.join(", "));
        for c in &self.criteria {
            s.push_str(&format!("[{:<7}] {:>2}. {}\n", c.status.label(), c.id, c.name));
            for d in &c.details {
                s.push_str(&format!("            {d}\n"));
            }
        }
        for c in &self.extra {
            s.push_str(&format!("[{:<7}]     {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
        }
        let count = |st| self.criteria.iter().filter(|c| c.status == st).count();
        s.push_str(&format!(
            "passed {}, failed {}, skipped {}\n",
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Skipped)
        ));
        s
    }
}

fn find_checks(dir: &Path, found: &mut Vec<PathBuf>) -> Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            find_checks(&p, found)?;
        } else if p.file_name().is_some_and(|n| n == CHECKS_FILE) {
            found.push(p);
        }
    }
    Ok(())
}

pub fn build(dir: &Path) -> Result<Report> {
    if !dir.is_dir() {
        bail!("no run directory at {}", dir.display());
    }
    let mut files = Vec::new();
    find_checks(dir, &mut files)?;
    if files.is_empty() {
        bail!("missing run artifacts: no {CHECKS_FILE} under {}", dir.display());
    }
    let mut runs = Vec::new();
    let mut all = Vec::new();
    for f in &files {
        let (exp, checks) = read_checks(f)?;
        let rel =
            f.parent().and_then(|p| p.strip_prefix(dir).ok()).map(|p| p.display().to_string()).unwrap_or_default();
        runs.push(if rel.is_empty() { exp } else { format!("{exp} ({rel})") });
        all.extend(checks);
    }
    let criteria = CRITERIA
        .iter()
        .enumerate()
        .map(|(i, &name)| {
            let id = i as u8 + 1;
            let mine: Vec<&Check> = all.iter().filter(|c| c.criterion == Some(id)).collect();
            let status = if mine.is_empty() {
                Status::Skipped
            } else if mine.iter().all(|c| c.passed) {
                Status::Pass
            } else {
                Status::Fail
            };
            CriterionLine { id, name, status, details: mine.iter().map(|c| c.detail.clone()).collect() }
        })
        .collect();
    let extra = all.iter().filter(|c| c.criterion.is_none()).cloned().collect();
    Ok(Report { runs, criteria, extra })
}

/// Builds the report and writes `summary.txt` and `summary.json` into `dir`.
pub fn write(dir: &Path) -> Result<Report> {
    let report = build(dir)?;
    fs::write(dir.join("summary.txt"), report.to_text())?;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&json!(report))? + "\n")?;
    Ok(report)
}
