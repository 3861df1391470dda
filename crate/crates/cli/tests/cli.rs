use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eteleport(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eteleport")).args(args).env_remove("ETELEPORT_SEED").output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = eteleport(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&all)).unwrap()
}

/// Rows of a named CSV section, header first.
fn csv_section(text: &str, name: &str) -> Vec<Vec<String>> {
    let marker = format!("# {name}");
    text.lines()
        .skip_while(|l| *l != marker)
        .skip(1)
        .take_while(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn ideal_text_reports_quarter_sixteenth() {
    let text = stdout(&["ideal", "--R", "0.5", "--phi", "0"]);
    assert!(text.contains("p(++) = 0.0625"), "{text}");
    assert!(text.contains("p(--) = 0.0625"));
}

#[test]
fn ideal_json_has_unit_fidelity() {
    let v = json(&["ideal", "--R", "0.5", "--phi", "0"]);
    assert_eq!(v["summary"]["fidelity"], 1.0);
    let eff = v["summary"]["efficiency_feedforward"].as_f64().unwrap();
    assert!((eff - 0.25).abs() < 1e-12);
    assert_eq!(v["outcomes"].as_object().unwrap().len(), 16);
    assert_eq!(v["bob"].as_array().unwrap().len(), 4);
}

#[test]
fn ideal_accepts_negative_phase() {
    let v = json(&["ideal", "--R", "0.3", "--phi", "-1.2"]);
    assert!((v["summary"]["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn noiseless_saw_is_perfect() {
    let v = json(&["saw", "--sigma2", "0", "--samples", "500"]);
    let row = &v["saw"][0];
    assert_eq!(row["F_analytic"], 1.0);
    assert!((row["F_sampled"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn leviton_fidelity_decreases_with_temperature() {
    let v = json(&["leviton"]);
    let rows = v["leviton"].as_array().unwrap();
    assert_eq!(rows.len(), 3 * 41);
    for chunk in rows.chunks(41) {
        let gamma = &chunk[0]["gamma [1/Omega]"];
        let mut prev = f64::INFINITY;
        for r in chunk {
            assert_eq!(&r["gamma [1/Omega]"], gamma);
            let f = r["F"].as_f64().unwrap();
            assert!(f <= prev, "F increased to {f} at {r}");
            prev = f;
        }
        assert_eq!(chunk[0]["F"], 1.0);
    }
}

#[test]
fn correlators_match_closed_forms() {
    let text = stdout(&["correlators", "--R", "0.3", "--phi", "1.2"]);
    assert!(text.contains("max deviation < 1e-10"), "{text}");
    let csv = stdout(&["correlators", "--format", "csv"]);
    let header = &csv_section(&csv, "moments")[0];
    assert_eq!(header.len(), 1 + 6 + 15 + 20);
    assert!(header.contains(&"Q_A0p_A1p_B1 [e^3/T]".to_owned()));
}

#[test]
fn repeat_runs_are_byte_identical() {
    let args = ["saw", "--sigma2", "0:2:0.5", "--samples", "2000", "--seed", "7", "--format", "csv"];
    assert_eq!(stdout(&args), stdout(&args));
    let mut serial = args.to_vec();
    serial.push("--serial");
    assert_eq!(stdout(&args), stdout(&serial));
}

#[test]
fn seed_comes_from_the_environment() {
    let args = ["saw", "--sigma2", "1", "--samples", "300", "--format", "csv"];
    let from_env =
        Command::new(env!("CARGO_BIN_EXE_eteleport")).args(args).env("ETELEPORT_SEED", "99").output().unwrap();
    let mut explicit = args.to_vec();
    explicit.extend(["--seed", "99"]);
    assert_eq!(String::from_utf8(from_env.stdout).unwrap(), stdout(&explicit));
    assert_ne!(stdout(&explicit), stdout(&args));
}

#[test]
fn json_and_csv_carry_the_same_values() {
    let args = ["leviton", "--gamma", "0.05,0.02", "--tau", "0:1:0.25"];
    let v = json(&args);
    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let rows = csv_section(&stdout(&csv_args), "leviton");
    let (header, body) = rows.split_first().unwrap();
    let objects = v["leviton"].as_array().unwrap();
    assert_eq!(body.len(), objects.len());
    for (row, obj) in body.iter().zip(objects) {
        for (col, cell) in header.iter().zip(row) {
            assert_eq!(cell.parse::<f64>().unwrap(), obj[col].as_f64().unwrap(), "{col}");
        }
    }
    // Rows are sorted regardless of argument order.
    assert_eq!(objects[0]["gamma [1/Omega]"], 0.02);
}

#[test]
fn output_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ideal.json");
    let printed = stdout(&["ideal", "--format", "json"]);
    let written = stdout(&["ideal", "--format", "json", "--output", path.to_str().unwrap()]);
    assert!(written.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn bad_arguments_exit_with_two() {
    for args in [
        &["ideal", "--R", "2"][..],
        &["saw", "--sigma2", "1:0:0.5"],
        &["saw", "--sigma2", "-1"],
        &["leviton", "--gamma", "0"],
        &["bogus"],
        &["ideal", "--format", "xml"],
        &["circuit-check", "/nonexistent/file.circ"],
    ] {
        let out = eteleport(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn circuit_check_reports_error_positions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.circ");
    std::fs::write(&path, "modes a b\n\nprep a b R=2 phi=0\n").unwrap();
    let out = eteleport(&["circuit-check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(":3:10: parameter out of range"), "{err}");
}

#[test]
fn circuit_check_accepts_the_corpus() {
    let corpus = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/corpus");
    for entry in std::fs::read_dir(corpus).unwrap() {
        let path = entry.unwrap().path();
        let v = json(&["circuit-check", path.to_str().unwrap()]);
        assert!(v["circuit"]["unitarity_deviation"].as_f64().unwrap() < 1e-12, "{}", path.display());
    }
}

#[test]
fn verify_exit_code_tracks_failures() {
    let out = eteleport(&["verify", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows = csv_section(&text, "criteria");
    assert_eq!(rows.len(), 1 + 13);
    let any_failed = rows[1..].iter().any(|r| r[2] == "false");
    assert_eq!(out.status.code(), Some(if any_failed { 1 } else { 0 }));
}
