use serde_json::Value;
use std::process::{Command, Output};

fn kgspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgspec")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    kgspec(args).status.code().expect("exit code")
}

fn json(args: &[&str]) -> Value {
    let out = kgspec(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_file(name: &str, body: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("kgspec-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn exit_code_matrix() {
    let cases: &[(&[&str], i32)] = &[
        (&["bounds", "--domain", "box:1x1", "--k", "6"], 0),
        (&["bounds", "--domain", "box:1xq", "--k", "6"], 2),
        (&["bounds", "--domain", "interval:2", "--k", "3"], 0),
        (&["bounds", "--domain", "interval:2", "--k", "3", "--strict"], 3),
        (&["bounds", "--domain", "ball:3,1", "--k", "2"], 0),
        (&["eigs", "--domain", "ball:2,1", "--family", "sine", "--resolution", "8", "--k", "2"], 4),
        (&["eigs", "--domain", "box:1x1x1", "--family", "sine", "--resolution", "4", "--k", "2"], 4),
        (&["eigs", "--domain", "interval:1", "--family", "sine", "--resolution", "4", "--k", "5"], 2),
        (&["eigs", "--domain", "interval:1", "--family", "sine", "--resolution", "16", "--k", "2", "--xi-cutoff", "51"], 5),
        (&["eigs", "--domain", "interval:1", "--family", "sine", "--resolution", "16", "--k", "2", "--xi-cutoff", "0.5"], 2),
        (&["eigs", "--domain", "interval:1", "--family", "cosine", "--resolution", "16", "--k", "2"], 2),
        (&["verify", "--domain", "interval:2", "--k", "0"], 2),
        (&["verify", "--domain", "ball:2,1", "--k", "2"], 4),
        (&["lemma", "--d", "1", "--trials", "10"], 2),
        (&["lemma", "--d", "2", "--phi", "{\"knots\":[0,1],\"values\":[0,1],\"m\":1}"], 2),
        (&["lemma", "--d", "2", "--phi", "not json"], 2),
        (&["lemma", "--d", "2", "--trials", "50", "--seed", "1"], 0),
        (&["frobnicate"], 2),
    ];
    for (args, want) in cases {
        assert_eq!(code(args), *want, "{args:?}");
    }
}

#[test]
fn bounds_output() {
    let v = json(&["bounds", "--domain", "box:1x1", "--k", "1"]);
    let row = &v["rows"][0];
    assert!((row["leading_term"].as_f64().unwrap() - 2.363_271_801_207_354_7).abs() < 1e-12);
    assert!((row["correction_term"].as_f64().unwrap() - 0.011_972_474_808_344_437).abs() < 1e-12);
    let csv = kgspec(&["bounds", "--domain", "box:1x1", "--k", "3", "--format", "csv"]);
    assert!(csv.status.success());
    assert_eq!(String::from_utf8(csv.stdout).unwrap().lines().count(), 4);
}

#[test]
fn lemma_tent_diagnostic() {
    let v = json(&["lemma", "--d", "2", "--phi", "{\"knots\":[0,1],\"values\":[1,0],\"m\":1}"]);
    assert!((v["lemma_gap"].as_f64().unwrap() + 0.012_891_711_531_604_294).abs() < 1e-12);
    assert!((v["A"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(v["step12"]["holds"], Value::Bool(false));
}

#[test]
fn riesz_examples() {
    let path = temp_file("spec.json", "[1, 2, 3]");
    let p = path.to_str().unwrap();
    for (z, sigma, want) in [("2.5", "1", 2.0), ("2.5", "0", 2.0), ("0.5", "1", 0.0)] {
        let v = json(&["riesz", "--spectrum", p, "--z", z, "--sigma", sigma]);
        assert_eq!(v["riesz_mean"].as_f64().unwrap(), want);
    }
    let bad = temp_file("bad.json", "[1, 3, 2]");
    assert_eq!(code(&["riesz", "--spectrum", bad.to_str().unwrap(), "--z", "1", "--sigma", "1"]), 2);
    let _ = std::fs::remove_file(path);
    let _ = std::fs::remove_file(bad);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let runs: &[&[&str]] = &[
        &["--no-timestamp", "verify", "--domain", "interval:2", "--k", "5"],
        &["eigs", "--domain", "box:1x2", "--family", "hat", "--resolution", "8", "--k", "3"],
        &["lemma", "--d", "3", "--trials", "200", "--seed", "42"],
    ];
    for args in runs {
        let a = kgspec(args);
        let b = kgspec(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    // with a timestamp the only difference is that field
    let args = ["verify", "--domain", "interval:1", "--k", "2"];
    let mut a: Value = serde_json::from_slice(&kgspec(&args).stdout).unwrap();
    let mut b: Value = serde_json::from_slice(&kgspec(&args).stdout).unwrap();
    assert!(a["timestamp"].is_string());
    a["timestamp"] = Value::Null;
    b["timestamp"] = Value::Null;
    assert_eq!(a, b);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["--no-timestamp", "verify", "--domain", "box:1x1", "--k", "3"];
    let one = Command::new(env!("CARGO_BIN_EXE_kgspec")).args(args).env("KGSPEC_THREADS", "1").output().unwrap();
    let two = Command::new(env!("CARGO_BIN_EXE_kgspec")).args(args).env("KGSPEC_THREADS", "3").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn verify_writes_report_file() {
    let path = std::env::temp_dir().join(format!("kgspec-{}-report.json", std::process::id()));
    let out = kgspec(&["--no-timestamp", "verify", "--domain", "interval:2", "--k", "3", "--family", "sine", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout.strip_suffix(b"\n").unwrap_or(&out.stdout));
    let _ = std::fs::remove_file(path);
}
