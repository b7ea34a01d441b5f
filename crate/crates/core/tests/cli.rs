use std::path::{Path, PathBuf};
use std::process::Command;

use krein_star::cli;
use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("krein-star").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const IRRATIONAL: &str = r#"{"format": "krein-star/1", "central_mass": "1/3",
  "edges": [{"id": "a", "length": "1", "masses": [{"x": "1/4", "m": "1"}, {"x": "1/2", "m": "2"}]},
            {"id": "b", "length": "3/2", "masses": [{"x": "1/3", "m": "1/2"}]}]}"#;

#[test]
fn forward_then_inverse_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let spectral = dir.path().join("spectral.json");
    let b = data("example_b.json");
    let (code, _, err) = run(&["forward", "--measure", b.to_str().unwrap(), "--out", spectral.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&spectral).unwrap()).unwrap();
    assert_eq!(doc["format"], "krein-star/1");
    assert_eq!(doc["sigma"], serde_json::json!(["2", "4"]));
    assert_eq!(doc["kappa"], serde_json::json!({"4": 2}));

    let (code, out, err) = run(&["inverse", "--spectral", spectral.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out, std::fs::read_to_string(&b).unwrap());
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", IRRATIONAL);
    let a = run(&["forward", "--measure", &m]);
    let b = run(&["forward", "--measure", &m]);
    assert_eq!(a.0, 0, "{}", a.2);
    assert_eq!(a.1, b.1);
}

#[test]
fn malformed_json_reports_a_path() {
    let dir = TempDir::new().unwrap();
    let syntax = write(&dir, "s.json", "{\"edges\": [");
    let (code, _, err) = run(&["validate", "--measure", &syntax]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error[schema]") && err.contains('$'), "{err}");

    let bad_mass = IRRATIONAL.replace(r#""m": "2""#, r#""m": "-2""#);
    let p = write(&dir, "m.json", &bad_mass);
    let (code, _, err) = run(&["forward", "--measure", &p]);
    assert_eq!(code, 1);
    assert!(err.contains("$.edges[0].masses[1].m"), "{err}");

    let typo = IRRATIONAL.replace("central_mass", "centre_mass");
    let p = write(&dir, "t.json", &typo);
    let (code, _, err) = run(&["validate", "--measure", &p]);
    assert_eq!(code, 1);
    assert!(err.contains("centre_mass"), "{err}");

    let version = IRRATIONAL.replace("krein-star/1", "krein-star/9");
    let p = write(&dir, "v.json", &version);
    assert_eq!(run(&["validate", "--measure", &p]).0, 1);
}

#[test]
fn invalid_spectral_data_lists_violations() {
    let dir = TempDir::new().unwrap();
    let doc = r#"{"format": "krein-star/1",
      "graph": {"edges": [{"id": "e1", "length": "1"}, {"id": "e2", "length": "1"}, {"id": "e3", "length": "1"}]},
      "sigma": ["2", "4"], "sigma_e": {"e1": ["4"], "e2": ["4"], "e3": ["4"]}}"#;
    let p = write(&dir, "s.json", doc);
    let (code, _, err) = run(&["validate", "--spectral", &p]);
    assert_eq!(code, 1);
    assert!(err.contains("missing-coupling"), "{err}");
    let (code, _, _) = run(&["inverse", "--spectral", &p]);
    assert_eq!(code, 1);
}

#[test]
fn roundtrip_oracle_and_truncate_reports() {
    let dir = TempDir::new().unwrap();
    let b = data("example_b.json");
    let b = b.to_str().unwrap();

    let (code, out, err) = run(&["roundtrip", "--measure", b]);
    assert_eq!(code, 0, "{err}");
    let row = out.lines().find(|l| l.starts_with("0,")).unwrap();
    assert!(row.ends_with(",0,pass"), "{row}");

    let csv = dir.path().join("rt.csv");
    let (code, _, err) = run(&["roundtrip", "--random", "3", "--seed", "11", "--out", csv.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# prng=ChaCha8Rng seed=11 cases=3\n"), "{text}");
    assert_eq!(text.lines().filter(|l| l.ends_with(",pass")).count(), 3);

    let (code, out, _) = run(&["oracle", "--measure", b]);
    assert_eq!(code, 0);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",pass")));

    let (code, out, _) = run(&["truncate", "--measure", b, "--cutoffs", "1,3,5"]);
    assert_eq!(code, 0);
    let rows: Vec<Vec<&str>> = out.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let traces: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    assert_eq!(traces, ["0", "0.5", "1"]);
    assert!(rows.iter().all(|r| r[1] == r[2]));
    assert_eq!(*rows[2].last().unwrap(), "true");

    let (code, _, err) = run(&["truncate", "--measure", b, "--cutoffs", "3,1"]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn roundtrip_beyond_tolerance_exits_2() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", IRRATIONAL);
    let (code, _, err) = run(&["--digits", "6", "roundtrip", "--measure", &m, "--tol", "1e-30"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn empty_measure_passes_trivially() {
    let dir = TempDir::new().unwrap();
    let m = write(
        &dir,
        "m.json",
        r#"{"format": "krein-star/1", "central_mass": "0",
            "edges": [{"id": "a", "length": "1", "masses": []}, {"id": "b", "length": "2", "masses": []}]}"#,
    );
    let (code, out, err) = run(&["roundtrip", "--measure", &m]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains(",pass"));
}

fn significant_digits(s: &str) -> usize {
    s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len()
}

#[test]
fn binary_honors_the_digits_variable() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", IRRATIONAL);
    let exe = env!("CARGO_BIN_EXE_krein-star");
    let sigma = |env: Option<&str>, flag: Option<&str>| -> Vec<String> {
        let mut cmd = Command::new(exe);
        cmd.env_remove(cli::DIGITS_ENV);
        if let Some(v) = env {
            cmd.env(cli::DIGITS_ENV, v);
        }
        if let Some(f) = flag {
            cmd.args(["--digits", f]);
        }
        let out = cmd.args(["forward", "--measure", &m]).output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
        doc["sigma"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect()
    };
    let default = sigma(None, None);
    assert!(default.iter().any(|s| significant_digits(s) == 30), "{default:?}");
    let short = sigma(Some("8"), None);
    assert!(short.iter().all(|s| significant_digits(s) <= 8), "{short:?}");
    assert!(short.iter().any(|s| significant_digits(s) == 8));
    // the flag wins over the variable
    assert_eq!(sigma(Some("8"), Some("12")), sigma(None, Some("12")));

    let out = Command::new(exe).env(cli::DIGITS_ENV, "zero").args(["forward", "--measure", &m]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
