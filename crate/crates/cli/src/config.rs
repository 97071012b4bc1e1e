//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Curvature,
    Decay,
    Collapse,
    Glue,
    Yamabe,
    Charclass,
    Classify,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Curvature,
        Experiment::Decay,
        Experiment::Collapse,
        Experiment::Glue,
        Experiment::Yamabe,
        Experiment::Charclass,
        Experiment::Classify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Curvature => "curvature",
            Experiment::Decay => "decay",
            Experiment::Collapse => "collapse",
            Experiment::Glue => "glue",
            Experiment::Yamabe => "yamabe",
            Experiment::Charclass => "charclass",
            Experiment::Classify => "classify",
        }
    }

    /// Parameter keys accepted besides `experiment`, `seed` and `out`.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            Experiment::Curvature => &["preset", "param", "link", "r_max", "samples", "tolerance"],
            Experiment::Decay => &["base", "eps", "bump", "samples", "deficit_eps", "tolerance"],
            Experiment::Collapse => &["bundle", "t", "samples", "tolerance"],
            Experiment::Glue => &["ell", "t", "truncation", "samples"],
            Experiment::Yamabe => &[
                "dim",
                "n",
                "amp",
                "init",
                "laplacian",
                "max_iters",
                "tolerance",
                "law_n",
                "holder_draws",
                "negative_draws",
            ],
            Experiment::Charclass => &["models"],
            Experiment::Classify => &["input", "blowups"],
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s.trim()).ok_or_else(|| anyhow!("unknown experiment `{s}`"))
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub params: BTreeMap<String, String>,
    pub out: PathBuf,
    pub seed: u64,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{}`", no + 1, raw.trim()))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

pub fn parse_assignment(s: &str) -> Result<(String, String)> {
    let (k, v) = s.split_once('=').ok_or_else(|| anyhow!("expected KEY=VALUE, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

impl ExperimentConfig {
    /// Layers the config file, then `--set` overrides, then dedicated flags.
    pub fn build(
        experiment: Experiment,
        file: Option<&Path>,
        overrides: &[(String, String)],
        flags: &[(&str, Option<String>)],
    ) -> Result<Self> {
        let mut merged: BTreeMap<String, String> = BTreeMap::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            for (k, v) in parse_pairs(&text).with_context(|| format!("parsing config {}", path.display()))? {
                if merged.insert(k.clone(), v).is_some() {
                    bail!("config {}: key `{k}` given twice", path.display());
                }
            }
        }
        for (k, v) in overrides {
            merged.insert(k.clone(), v.clone());
        }
        for (k, v) in flags {
            if let Some(v) = v {
                merged.insert((*k).to_string(), v.clone());
            }
        }
        if let Some(named) = merged.remove("experiment") {
            let named: Experiment = named.parse()?;
            if named != experiment {
                bail!("key `experiment`: config names `{named}` but the subcommand is `{experiment}`");
            }
        }
        let seed = match merged.remove("seed") {
            Some(s) => s.parse().map_err(|_| anyhow!("key `seed`: expected a non-negative integer, got `{s}`"))?,
            None => 0,
        };
        let out =
            merged.remove("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out").join(experiment.name()));
        for k in merged.keys() {
            if !experiment.keys().contains(&k.as_str()) {
                bail!("unknown key `{k}` for experiment {experiment} (accepted: {})", experiment.keys().join(", "));
            }
        }
        Ok(Self { experiment, params: merged, out, seed })
    }

    /// All settings as one sorted `key=value` line.
    pub fn canonical(&self) -> String {
        let mut parts = vec![format!("experiment={}", self.experiment), format!("seed={}", self.seed)];
        parts.extend(self.params.iter().map(|(k, v)| format!("{k}={v}")));
        parts.join(" ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert("experiment".into(), self.experiment.name().into());
        map.insert("seed".into(), self.seed.into());
        for (k, v) in &self.params {
            map.insert(k.clone(), v.clone().into());
        }
        serde_json::Value::Object(map)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(self.experiment.keys().contains(&key), "undeclared key {key}");
        self.params.get(key).map(String::as_str)
    }

    pub fn parsed<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s.parse().map_err(|e| anyhow!("key `{key}`: invalid value `{s}` ({e})")),
        }
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64> {
        let v: f64 = self.parsed(key, default)?;
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            bail!("key `{key}`: must be a positive number, got {v}")
        }
    }

    pub fn count(&self, key: &str, default: usize) -> Result<usize> {
        let v: usize = self.parsed(key, default)?;
        if v == 0 {
            bail!("key `{key}`: must be at least 1");
        }
        Ok(v)
    }

    pub fn list<T>(&self, key: &str, default: &[T]) -> Result<Vec<T>>
    where
        T: FromStr + Clone,
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(s) => {
                let items = s
                    .split(',')
                    .map(str::trim)
                    .filter(|x| !x.is_empty())
                    .map(|x| x.parse().map_err(|e| anyhow!("key `{key}`: invalid entry `{x}` ({e})")))
                    .collect::<Result<Vec<T>>>()?;
                if items.is_empty() {
                    bail!("key `{key}`: empty list");
                }
                Ok(items)
            }
        }
    }

    pub fn choice(&self, key: &str, options: &[&str], default: &str) -> Result<String> {
        let v = self.raw(key).unwrap_or(default).to_ascii_lowercase();
        if options.contains(&v.as_str()) {
            Ok(v)
        } else {
            bail!("key `{key}`: `{v}` is not one of {}", options.join(", "))
        }
    }

    pub fn text(&self, key: &str, default: &str) -> String {
        self.raw(key).unwrap_or(default).to_string()
    }

    pub fn choices(&self, key: &str, options: &[&str], default: &[&str]) -> Result<Vec<String>> {
        let items: Vec<String> = match self.raw(key) {
            None => default.iter().map(|s| s.to_string()).collect(),
            Some(s) => s.split(',').map(|x| x.trim().to_ascii_lowercase()).filter(|x| !x.is_empty()).collect(),
        };
        if items.is_empty() {
            bail!("key `{key}`: empty list");
        }
        for it in &items {
            if !options.contains(&it.as_str()) {
                bail!("key `{key}`: `{it}` is not one of {}", options.join(", "));
            }
        }
        Ok(items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn comments_and_blank_lines() {
        let p = parse_pairs("# header\n\nbase = eh  # family\neps=0.2,0.1\n").unwrap();
        assert_eq!(p, set(&[("base", "eh"), ("eps", "0.2,0.1")]));
        assert!(parse_pairs("just words").is_err());
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::build(Experiment::Decay, None, &set(&[("epsilon", "1")]), &[]).unwrap_err();
        assert!(err.to_string().contains("`epsilon`"));
    }

    #[test]
    fn flags_override_sets() {
        let cfg = ExperimentConfig::build(
            Experiment::Curvature,
            None,
            &set(&[("samples", "10"), ("seed", "3")]),
            &[("samples", Some("20".into())), ("seed", None)],
        )
        .unwrap();
        assert_eq!(cfg.params["samples"], "20");
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.canonical(), "experiment=curvature seed=3 samples=20");
    }

    #[test]
    fn mismatched_experiment() {
        assert!(ExperimentConfig::build(Experiment::Glue, None, &set(&[("experiment", "decay")]), &[]).is_err());
        assert!(ExperimentConfig::build(Experiment::Glue, None, &set(&[("experiment", "glue")]), &[]).is_ok());
    }

    #[test]
    fn typed_values() {
        let cfg = ExperimentConfig::build(
            Experiment::Decay,
            None,
            &set(&[("eps", "0.2, 0.1,0.05"), ("base", "Burns"), ("tolerance", "-1")]),
            &[],
        )
        .unwrap();
        assert_eq!(cfg.list("eps", &[1.0]).unwrap(), vec![0.2, 0.1, 0.05]);
        assert_eq!(cfg.choice("base", &["eh", "burns", "both"], "both").unwrap(), "burns");
        assert!(cfg.positive("tolerance", 1.0).is_err());
        assert_eq!(cfg.count("samples", 7).unwrap(), 7);
    }
}
