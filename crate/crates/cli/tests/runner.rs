use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn curvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvlab")).args(args).output().expect("spawn curvlab")
}

fn run_ok(args: &[&str]) -> String {
    let out = curvlab(args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Drops the two comment lines and checks the hash they carry.
fn csv_body(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.splitn(3, '\n');
    assert!(lines.next().unwrap().starts_with("# config experiment="));
    let hash = lines.next().unwrap().strip_prefix("# sha256 ").unwrap().to_string();
    let body = lines.next().unwrap().to_string();
    assert_eq!(hash, hex::encode(Sha256::digest(body.as_bytes())));
    body
}

#[test]
fn decay_reports_quadratic_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("decay");
    run_ok(&[
        "decay",
        "--set",
        "base=EH",
        "--set",
        "eps=0.2,0.1,0.05,0.025",
        "--samples",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    let body = csv_body(&out.join("decay.csv"));
    assert_eq!(body.lines().next(), Some("base,epsilon,sup_norm,log_eps,log_sup"));
    assert_eq!(body.lines().count(), 5);
    let doc = json(&out.join("decay.json"));
    let slope = doc["result"]["bases"][0]["fitted_slope"].as_f64().unwrap();
    assert!((1.8..=2.2).contains(&slope), "slope {slope}");
    let checks = json(&out.join("checks.json"));
    assert!(checks["result"]["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert!(out.join("run.meta.json").exists());
}

#[test]
fn classify_reproduces_sign_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("classify");
    let stdout = run_ok(&["classify", "--out", out.to_str().unwrap()]);
    assert!(stdout.contains("PASS [12]"));
    let doc = json(&out.join("classify.json"));
    let signs: Vec<&str> =
        doc["result"]["surfaces"].as_array().unwrap().iter().map(|s| s["answer"]["sign"].as_str().unwrap()).collect();
    assert_eq!(signs, ["Positive", "Positive", "Zero", "Zero", "Zero", "Negative"]);
    let body = csv_body(&out.join("classify.csv"));
    assert_eq!(body.lines().count(), 7);
}

#[test]
fn classify_reads_a_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("surfaces.json");
    fs::write(
        &input,
        r#"[{"name": "horikawa", "data": {"kod": "2", "b1_parity": "even", "c1sq_min": 1, "chi": 11, "tau": -7, "blowups": 0}},
            {"kod": "0", "b1_parity": "even", "c1sq_min": 0, "chi": 24, "tau": -16, "blowups": 0}]"#,
    )
    .unwrap();
    let out = dir.path().join("c");
    run_ok(&[
        "classify",
        "--set",
        &format!("input={}", input.display()),
        "--set",
        "blowups=2",
        "--out",
        out.to_str().unwrap(),
    ]);
    let doc = json(&out.join("classify.json"));
    let s = &doc["result"]["surfaces"];
    assert_eq!(s[0]["name"], "horikawa");
    let v = s[0]["answer"]["value"].as_f64().unwrap();
    assert!((v + 4.0 * std::f64::consts::PI * 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(s[1]["surface"]["blowups"], 2);
    assert_eq!(s[1]["ricci_admissible"], false);
    // no criterion is claimed for custom input
    assert!(json(&out.join("checks.json"))["result"]["checks"].as_array().unwrap().is_empty());
}

#[test]
fn flat_preset_reports_zero_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("flat");
    run_ok(&["curvature", "--set", "preset=flat", "--samples", "40", "--out", out.to_str().unwrap()]);
    let body = csv_body(&out.join("curvature.csv"));
    assert_eq!(body.lines().count(), 41);
    for line in body.lines().skip(1) {
        for x in line.split(',').skip(1) {
            assert!(x.parse::<f64>().unwrap().abs() < 1e-9, "{line}");
        }
    }
}

#[test]
fn payloads_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |o: &str| {
        vec![
            "yamabe".to_string(),
            "--seed".into(),
            "11".into(),
            "--set".into(),
            "n=8".into(),
            "--set".into(),
            "init=random".into(),
            "--set".into(),
            "law_n=8,16".into(),
            "--set".into(),
            "max_iters=20".into(),
            "--set".into(),
            "holder_draws=20".into(),
            "--set".into(),
            "negative_draws=4".into(),
            "--out".into(),
            o.to_string(),
        ]
    };
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let v = args(d.to_str().unwrap());
        let _ = curvlab(&v.iter().map(String::as_str).collect::<Vec<_>>());
    }
    for f in ["descent.csv", "yamabe.json", "checks.json", "summary.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    // a different seed changes the random start
    let c = dir.path().join("c");
    let mut v = args(c.to_str().unwrap());
    v[2] = "12".into();
    let _ = curvlab(&v.iter().map(String::as_str).collect::<Vec<_>>());
    assert_ne!(fs::read(a.join("descent.csv")).unwrap(), fs::read(c.join("descent.csv")).unwrap());
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# collapse sweep\nexperiment = collapse\nbundle = nil\nt = 1, 10, 100\nsamples = 3\n").unwrap();
    let out = dir.path().join("col");
    run_ok(&[
        "collapse",
        "--config",
        cfg.to_str().unwrap(),
        "--set",
        "samples=5",
        "--samples",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(out.join("collapse.csv")).unwrap();
    assert!(text.starts_with("# config experiment=collapse seed=0 bundle=nil samples=4 t=1, 10, 100\n"), "{text}");
    assert_eq!(csv_body(&out.join("collapse.csv")).lines().count(), 4);
}

#[test]
fn invalid_configs_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("x");
    let o = o.to_str().unwrap();
    for (args, key) in [
        (vec!["decay", "--set", "epsilon=0.1", "--out", o], "`epsilon`"),
        (vec!["glue", "--tolerance", "1e-3", "--out", o], "`tolerance`"),
        (vec!["curvature", "--set", "preset=kerr", "--out", o], "`preset`"),
        (vec!["decay", "--set", "eps=0.1,abc", "--out", o], "`eps`"),
        (vec!["classify", "--set", "input=/nonexistent.json", "--out", o], "`input`"),
    ] {
        let out = curvlab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(key), "{args:?}: {err}");
    }
    assert!(!dir.path().join("x").exists());
}

#[test]
fn report_collates_and_marks_skipped() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["classify", "--out", dir.path().join("classify").to_str().unwrap()]);
    run_ok(&["charclass", "--out", dir.path().join("charclass").to_str().unwrap()]);
    let stdout = run_ok(&["report", dir.path().to_str().unwrap()]);
    assert!(stdout.contains("passed 2, failed 0, skipped 11"), "{stdout}");
    let summary = json(&dir.path().join("summary.json"));
    let statuses: Vec<&str> =
        summary["criteria"].as_array().unwrap().iter().map(|c| c["status"].as_str().unwrap()).collect();
    assert_eq!(statuses.len(), 13);
    assert_eq!(statuses[9], "PASS");
    assert_eq!(statuses[11], "PASS");
    assert_eq!(statuses.iter().filter(|s| **s == "SKIPPED").count(), 11);
    assert!(fs::read_to_string(dir.path().join("summary.txt")).unwrap().contains("[SKIPPED]  1."));
}

#[test]
fn report_rejects_missing_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = curvlab(&["report", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing run artifacts"));
    let out = curvlab(&["report", dir.path().join("nope").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
