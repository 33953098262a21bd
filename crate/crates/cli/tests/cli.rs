use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const DESK: &str = include_str!("../../../configs/desk.json");

fn upade(args: &[&str], out_dir: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_upade"));
    cmd.args(args);
    match out_dir {
        Some(d) => cmd.env("UPADE_OUTPUT_DIR", d),
        None => cmd.env_remove("UPADE_OUTPUT_DIR"),
    };
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("cfg.json");
    fs::write(&path, text).unwrap();
    path
}

fn coeff(v: &Value, k: usize) -> (f64, f64) {
    let c = &v["coeffs"][k];
    (c[0].as_f64().unwrap(), c[1].as_f64().unwrap())
}

#[test]
fn exp_one_one() {
    let o = upade(&["pade", "--fn", "exp", "--p", "1", "--q", "1"], None);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (num, den) = (&v["value"]["numerator"], &v["value"]["denominator"]);
    assert_eq!(coeff(num, 0), (1.0, 0.0));
    assert_eq!(coeff(num, 1), (0.5, 0.0));
    assert_eq!(coeff(den, 0), (1.0, 0.0));
    assert_eq!(coeff(den, 1), (-0.5, 0.0));
}

#[test]
fn geometric_normality_table() {
    let o = upade(&["pade", "--fn", "geometric", "--table", "4", "3"], None);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,q=0,q=1,q=2,q=3"));
    for (p, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[0], p.to_string());
        assert_eq!(cells[2], "true");
        if p >= 1 {
            assert_eq!(&cells[3..], ["false", "false"]);
        }
    }
}

#[test]
fn coefficient_file_partial_sum() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("c.json");
    fs::write(&path, r#"[1, 0.5, "0.25", [0.125, -1], 0.0625, 0.03125, 7]"#).unwrap();
    let out = dir.path().join("r.json");
    let o = upade(
        &["pade", "--coeffs", path.to_str().unwrap(), "--q", "0", "--p", "5", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    let num = &v["value"]["numerator"];
    assert_eq!(num["coeffs"].as_array().unwrap().len(), 6);
    assert_eq!(coeff(num, 3), (0.125, -1.0));
    assert_eq!(coeff(num, 5), (0.03125, 0.0));
}

#[test]
fn exit_codes_for_pade() {
    let o = upade(&["pade", "--fn", "geometric", "--p", "2", "--q", "2"], None);
    assert_eq!(code(&o), 2);
    let o = upade(&["pade", "--fn", "exp", "--p", "1", "--q", "1", "--prec", "24"], None);
    assert_eq!(code(&o), 3);
    let o = upade(&["pade", "--coeffs", "/nonexistent/c.json", "--p", "1", "--q", "1"], None);
    assert_eq!(code(&o), 3);
    let o = upade(&["pade", "--series", "1,0,0,1", "--p", "1", "--q", "1"], None);
    assert_eq!(code(&o), 2);
    let o = upade(&["pade", "--fn", "rational:1;1,-1", "--p", "2", "--q", "1"], None);
    assert_eq!(code(&o), 0);
}

#[test]
fn schedule_tables() {
    let o = upade(&["universal", "schedule", "--systems", "3", "--steps", "5"], None);
    assert_eq!(stdout(&o).trim(), "[1,2,3,1,2]");
    let o = upade(&["universal", "schedule", "--systems", "countable", "--steps", "3"], None);
    assert_eq!(stdout(&o).trim(), "[[1],[1,2],[1,2,3]]");
    let o = upade(&["universal", "schedule", "--systems", "0", "--steps", "3"], None);
    assert_eq!(code(&o), 3);
}

#[test]
fn build_artifacts_are_reproducible() {
    let cfg_dir = TempDir::new().unwrap();
    let cfg = write_config(&cfg_dir, DESK);
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let o = upade(&["universal", "build", "-c", cfg.to_str().unwrap(), "--steps", "3"], Some(dir.path()));
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<String> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["coefficients.csv", "invariants.json", "summary.csv", "transcript.json"]);
    for name in &names {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
    }
    let summary = fs::read_to_string(a.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("n,k_n,p_k,t_n,degree,error,budget\n"));
    assert_eq!(summary.lines().count(), 4);
    let inv: Value = serde_json::from_str(&fs::read_to_string(a.path().join("invariants.json")).unwrap()).unwrap();
    assert_eq!(inv["all_hold"], Value::Bool(true));
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, DESK);
    let cfg = cfg.to_str().unwrap();
    let o = upade(
        &["universal", "verify", "-c", cfg, "--target", "poly:1", "--s", "10", "--steps", "4"],
        Some(dir.path()),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("verdict.json")).unwrap()).unwrap();
    assert!(v["found"].is_u64());
    assert!(v["max_margin"].as_f64().unwrap() < 0.1);
    let o = upade(
        &["universal", "verify", "-c", cfg, "--target", "poly:0,0,0,1", "--s", "10", "--steps", "4"],
        Some(dir.path()),
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn config_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    for bad in [
        DESK.replace("\"precision\": 256", "\"precision\": 32"),
        DESK.replace("\"steps\": 6", "\"steps\": 0"),
        DESK.replace("\"shape\": \"disk\"", "\"shape\": \"blob\""),
        DESK.replace("\"mode\"", "\"mood\""),
        "{".to_string(),
    ] {
        let cfg = write_config(&dir, &bad);
        let o = upade(&["universal", "build", "-c", cfg.to_str().unwrap()], Some(dir.path()));
        assert_eq!(code(&o), 3, "{bad}");
    }
}

#[test]
fn fit_budget_exhaustion_exits_4() {
    let dir = TempDir::new().unwrap();
    let text = DESK.replace(
        "\"tolerances\": {\"check_mesh\": 0.01, \"mesh\": 0.05}",
        "\"tolerances\": {\"fit_initial_budget\": 1, \"fit_max_degree\": 1}",
    );
    let cfg = write_config(&dir, &text);
    let o = upade(&["universal", "build", "-c", cfg.to_str().unwrap(), "--steps", "3"], Some(dir.path()));
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("transcript.partial.json").exists());
}

#[test]
fn witnesses_and_span() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, DESK);
    let cfg = cfg.to_str().unwrap();
    for kind in ["type1", "qside"] {
        let o = upade(
            &["universal", "witness", "-c", cfg, "--kind", kind, "--target", "poly:1,2i", "--s", "10", "--eps", "0.05"],
            Some(dir.path()),
        );
        assert_eq!(code(&o), 0, "{kind}: {}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("witness.json")).unwrap()).unwrap();
        assert_eq!(v["passed"], Value::Bool(true));
    }
    let mut no_qside: Value = serde_json::from_str(DESK).unwrap();
    no_qside.as_object_mut().unwrap().remove("qside_table");
    let bare = write_config(&dir, &no_qside.to_string());
    let o = upade(
        &["universal", "witness", "-c", bare.to_str().unwrap(), "--kind", "qside", "--target", "poly:1", "--s", "10", "--eps", "0.05"],
        Some(dir.path()),
    );
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("qside_table"));

    let cfg = write_config(&dir, DESK);
    let o = upade(
        &["universal", "span", "-c", cfg.to_str().unwrap(), "--coefficients", "1;-0.5+2i", "--steps", "2"],
        Some(dir.path()),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("span.json")).unwrap()).unwrap();
    assert_eq!(v["depth"], 2);
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn metrics() {
    let o = upade(&["metrics", "chordal", "0", "inf"], None);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["chordal"], 1.0);
    let o = upade(&["metrics", "sequences", "--a", "1,2,3", "--b", "1,2,4"], None);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rho_d"]["first_difference"], 2);
    assert_eq!(v["rho_d"]["value"], 0.25);
    let o = upade(&["metrics", "sequences", "--a", "1,2", "--b", "1"], None);
    assert_eq!(code(&o), 3);
}
