use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const FOCK: &str = r#"{"model": "jcm", "lambda": 1.0, "omega": 1.0, "atom": "excited", "field": {"fock": 3}}"#;
const COHERENT_GROUND: &str = r#"{"model": "jcm", "lambda": 1.0, "atom": "ground", "field": {"coherent": [3, 0]}}"#;
const COHERENT_EXCITED: &str = r#"{"model": "jcm", "lambda": 1.0, "atom": "excited", "field": {"coherent": [3, 0]}}"#;
const BOSE_HUBBARD: &str = r#"{"model": "bose_hubbard", "j_hz": 66}"#;

fn write_spec(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn enttime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enttime")).args(args).output().unwrap()
}

fn run(args: &[&str]) -> String {
    let out = enttime(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(csv: &str) -> Vec<(f64, u32, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn timescale_fock_report() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "fock.json", FOCK);
    let report: Value = serde_json::from_str(&run(&["timescale", "--spec", s(&spec)])).unwrap();
    let lt = report["t_ent_natural"].as_f64().unwrap();
    assert!((lt - 0.5).abs() < 1e-12);
    assert!((lt * lt - 0.25).abs() < 1e-12);
    assert_eq!(report["degenerate"], Value::Bool(false));
    assert_eq!(report["spec"]["n_max"], 5);
    let preds = report["predictions"].as_array().unwrap();
    assert_eq!(preds.len(), 3);
    assert!((preds[0]["curvature"].as_f64().unwrap() - 16.0).abs() < 1e-12);
    assert!(report["timestamp_unix"].is_number());
}

#[test]
fn bose_hubbard_timescale_in_seconds() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "bh.json", BOSE_HUBBARD);
    let report: Value = serde_json::from_str(&run(&["timescale", "--spec", s(&spec)])).unwrap();
    let t = report["timescale"]["t_ent"].as_f64().unwrap();
    assert!((t * 1e3 - 1.21).abs() < 0.01, "{t}");
}

#[test]
fn degenerate_report_has_null_timescale() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "g.json", COHERENT_GROUND);
    let report: Value = serde_json::from_str(&run(&["timescale", "--spec", s(&spec)])).unwrap();
    assert_eq!(report["degenerate"], Value::Bool(true));
    assert!(report["timescale"]["t_ent"].is_null());
    assert!(report["t_ent_natural"].is_null());
}

#[test]
fn reproducible_output_is_byte_identical_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "fock.json", COHERENT_EXCITED);
    let args = ["timescale", "--spec", s(&spec), "--reproducible", "--alphas", "2,5"];
    let a = run(&args);
    assert_eq!(a, run(&args));
    let value: Value = serde_json::from_str(&a).unwrap();
    assert!(value["timestamp_unix"].is_null());
    let mut again = serde_json::to_string_pretty(&value).unwrap();
    again.push('\n');
    assert_eq!(again, a);

    let csv_args = ["evolve", "--spec", s(&spec), "--points", "17", "--alphas", "vn,2"];
    assert_eq!(run(&csv_args), run(&csv_args));
}

#[test]
fn malformed_json_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "bad.json", r#"{"model": "jcm", "lambda": "#);
    let out_path = dir.path().join("report.json");
    let out = enttime(&["timescale", "--spec", s(&spec), "--out", s(&out_path)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn schema_violations_exit_2_with_field_path() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "x.json", r#"{"model": "jcm", "lambda": 1, "atom": "excited", "field": {"fock": -1}}"#);
    let out = enttime(&["timescale", "--spec", s(&spec)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("field"));

    let spec = write_spec(&dir, "y.json", r#"{"model": "heisenberg"}"#);
    assert_eq!(enttime(&["timescale", "--spec", s(&spec)]).status.code(), Some(2));

    let spec = write_spec(&dir, "fock.json", FOCK);
    assert_eq!(enttime(&["timescale", "--spec", s(&spec), "--alphas", "0"]).status.code(), Some(2));
    assert_eq!(enttime(&["timescale", "--spec", s(&spec), "--alphas", "vn"]).status.code(), Some(2));
}

#[test]
fn model_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(
        &dir,
        "t.json",
        r#"{"model": "jcm", "lambda": 1, "atom": "excited", "field": {"coherent": [3, 0]}, "n_max": 10}"#,
    );
    let out = enttime(&["timescale", "--spec", s(&spec)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_max >="));

    let spec = write_spec(
        &dir,
        "c.json",
        r#"{"model": "custom", "dim_a": 2, "dim_b": 2,
            "terms": [{"a": {"re": [[0, 1], [0, 0]]}, "b": {"re": [[1, 0], [0, 1]]}}],
            "psi_a": {"re": [1, 0]}, "psi_b": {"re": [1, 0]}}"#,
    );
    assert_eq!(enttime(&["timescale", "--spec", s(&spec)]).status.code(), Some(3));
}

#[test]
fn evolve_fock_is_sinusoidal_and_bounded_by_ln2() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "fock.json", FOCK);
    let csv = run(&["evolve", "--spec", s(&spec), "--alphas", "2", "--t-max", "3", "--points", "301", "--ln2-units"]);
    assert!(csv.starts_with("t,alpha,entropy\n"));
    let r = rows(&csv);
    assert_eq!(r.len(), 301);
    let max = r.iter().map(|x| x.2).fold(0.0, f64::max);
    assert!(max <= 1.0 + 1e-12 && max > 0.99, "{max}");
    // zeros of sin(2 t) cos(2 t) sit at multiples of pi/4
    let near = |t: f64| r.iter().min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs())).unwrap().2;
    assert!(near(std::f64::consts::FRAC_PI_2) < 1e-3);
}

#[test]
fn coherent_ground_state_stays_separable_longer() {
    let dir = TempDir::new().unwrap();
    let ground = write_spec(&dir, "g.json", COHERENT_GROUND);
    let excited = write_spec(&dir, "e.json", COHERENT_EXCITED);
    let args =
        |p: &Path| run(&["evolve", "--spec", s(p), "--alphas", "2", "--t-max", "0.3", "--points", "31", "--ln2-units"]);
    let g = rows(&args(&ground));
    let e = rows(&args(&excited));
    assert!(g.iter().all(|x| x.2 < 0.05));
    assert!(e.last().unwrap().2 > 0.1);
    assert!(e.last().unwrap().2 > 10.0 * g.last().unwrap().2);
}

#[test]
fn evolve_ordering_and_spectrum_columns() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "fock.json", FOCK);
    let out = dir.path().join("s.csv");
    run(&["evolve", "--spec", s(&spec), "--alphas", "4,vn,2,4", "--points", "11", "--spectra", "--out", s(&out)]);
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("t,alpha,entropy,p1,p2\n"));
    let r = rows(&csv);
    assert_eq!(r.len(), 33);
    let alphas: Vec<u32> = r.iter().map(|x| x.1).collect();
    assert!(alphas.windows(2).all(|w| w[0] <= w[1]));
    for chunk in r.chunks(11) {
        assert!(chunk.windows(2).all(|w| w[1].0 > w[0].0));
    }
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f.iter().all(|x| x.is_finite()));
        assert!((f[3] + f[4] - 1.0).abs() < 1e-12 && f[3] >= f[4]);
    }
}

#[test]
fn evolve_rejects_bad_grids() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "fock.json", FOCK);
    assert_eq!(enttime(&["evolve", "--spec", s(&spec), "--points", "1"]).status.code(), Some(2));
    assert_eq!(enttime(&["evolve", "--spec", s(&spec), "--t-max", "-1"]).status.code(), Some(2));
    let bh = write_spec(&dir, "bh.json", BOSE_HUBBARD);
    assert_eq!(enttime(&["evolve", "--spec", s(&bh), "--spectra"]).status.code(), Some(2));
}

#[test]
fn verify_fock_passes() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "fock.json", FOCK);
    let json = dir.path().join("v.json");
    let table = run(&["verify", "--spec", s(&spec), "--alphas", "2,3,8", "--tolerance", "0.01", "--json", s(&json)]);
    assert_eq!(table.lines().filter(|l| l.starts_with("curvature ")).count(), 3);
    assert!(!table.contains("FAIL"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(report["all_pass"], Value::Bool(true));
}

#[test]
fn verify_degenerate_fits_sixth_order() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "g.json", COHERENT_GROUND);
    let json = dir.path().join("v.json");
    run(&["verify", "--spec", s(&spec), "--alphas", "2", "--json", s(&json)]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    let fit = report["checks"].as_array().unwrap().iter().find(|r| r["check"] == "sixth_order").unwrap();
    assert!((fit["measured"].as_f64().unwrap() - 6.0).abs() <= 0.1);
    assert_eq!(fit["status"], "PASS");
}

#[test]
fn verify_routes_alpha_one_to_the_probe() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "fock.json", FOCK);
    let table = run(&["verify", "--spec", s(&spec), "--alphas", "1"]);
    let line = table.lines().find(|l| l.starts_with("log_divergence")).unwrap();
    assert!(line.contains("INFO"));
    assert!(!table.lines().any(|l| l.starts_with("curvature ")));
}

#[test]
fn verify_failure_exits_4() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "fock.json", FOCK);
    let out = enttime(&["verify", "--spec", s(&spec), "--alphas", "2", "--tolerance", "1e-12"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn thread_cap_from_environment() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "fock.json", FOCK);
    let args = ["evolve", "--spec", s(&spec), "--points", "9"];
    let single = Command::new(env!("CARGO_BIN_EXE_enttime")).args(args).env("ENTTIME_THREADS", "1").output().unwrap();
    assert!(single.status.success());
    assert_eq!(String::from_utf8(single.stdout).unwrap(), run(&args));
    let bad = Command::new(env!("CARGO_BIN_EXE_enttime")).args(args).env("ENTTIME_THREADS", "0").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn sample_specs_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let report: Value = serde_json::from_str(&run(&["timescale", "--spec", s(&path)])).unwrap();
            assert!(report["timescale"]["t_ent_inv_sq"].as_f64().unwrap() >= 0.0);
            count += 1;
        }
    }
    assert!(count >= 5);
}
