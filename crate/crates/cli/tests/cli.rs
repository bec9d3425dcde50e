use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_setmotion"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name).display().to_string()
}

const TRIANGLE: &str = r#"{"type": "triangle", "params": {}}"#;

#[test]
fn triangle_scenario_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["run", &scenario("triangle.toml"), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let t = s["result"]["T"].as_f64().unwrap();
    assert!((t - 0.8703).abs() < 1e-4, "T = {t}");
    assert_eq!(s["result"]["residuals"]["admissibility"]["passed"], true);
    assert_eq!(s["result"]["residuals"]["junctions"]["passed"], true);
    let lines = std::fs::read_to_string(dir.path().join("motion.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), s["result"]["frames"].as_u64().unwrap() as usize);
    let svg = std::fs::read_to_string(dir.path().join("frame_01000.svg")).unwrap();
    assert!(svg.contains(r#"width="800" height="800""#));
}

#[test]
fn outputs_are_reproducible() {
    let a = run(&["run", &scenario("triangle.toml")]);
    let b = run(&["run", &scenario("triangle.toml")]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn feasibility_triangle_below_kappa() {
    let o = run(&["run", &scenario("feasibility_triangle.json")]);
    assert!(o.status.success());
    assert_eq!(json(&o)["result"]["verdict"], "NotEradicable");
    let o = run(&["feasibility", "--domain", TRIANGLE, "--effort", "0.7"]);
    assert_eq!(json(&o)["verdict"], "Unknown");
    let o = run(&["feasibility", "--domain", TRIANGLE, "--effort", "0.9"]);
    assert_eq!(json(&o)["verdict"], "Eradicable");
}

#[test]
fn malformed_domain_is_a_config_error() {
    let o = run(&["feasibility", "--domain", r#"{"type": "disc", "params": {"radius": "one"}}"#, "--effort", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 1 column"), "{err}");
    let o = run(&["feasibility", "--domain", r#"{"type": "disc", "params": {"radius": -1}}"#, "--effort", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "schema = 1\nname = \"x\"\neffort = 1.0\n[task]\nkind = \"teleport\"\n").unwrap();
    let o = run(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("teleport"));
}

#[test]
fn solver_errors_exit_3() {
    // below the triangle threshold
    let o = run(&["simulate", "--scenario", "triangle", "--effort", "0.6"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["freearc", "--symmetric", "--effort", "0.5", "--rho", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn validate_round_trip_and_violations() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["simulate", "--scenario", "wedge", "--effort", "1", "--out", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let wedge = r#"{"type": "right_wedge", "params": {"leg": 1.0}}"#;
    let motion = dir.path().join("motion.jsonl");
    let m = motion.to_str().unwrap();
    let o = run(&["validate", "--motion", m, "--domain", wedge, "--effort", "1", "--check", "junctions"]);
    assert!(o.status.success());
    assert_eq!(json(&o)["junctions"]["passed"], true);
    let o = run(&["validate", "--motion", m, "--domain", wedge, "--effort", "1", "--check", "admissibility"]);
    assert!(o.status.success());
    // claiming half the effort makes the same motion inadmissible
    let o = run(&["validate", "--motion", m, "--domain", wedge, "--effort", "0.5", "--check", "admissibility"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(json(&o)["admissibility"]["effort_violations"].as_u64().unwrap() > 0);
}

#[test]
fn mintime_and_freearc_values() {
    let disc = r#"{"type": "disc", "params": {"radius": 1}}"#;
    let o = run(&["mintime", "--domain", disc, "--effort", "2"]);
    let v = json(&o);
    assert_eq!(v["finite"], false);
    assert!(v["T"].is_null());
    let o = run(&["mintime", "--domain", disc, "--effort", "2.02"]);
    assert!(json(&o)["T"].as_f64().unwrap() > 0.0);
    let o = run(&["freearc", "--symmetric", "--effort", "2", "--rho", "0.25"]);
    let v = json(&o);
    let ell = v["ell"].as_f64().unwrap();
    assert!((ell - (2.0 - 2f64.sqrt())).abs() < 1e-14);
}

#[test]
fn corner_csv_and_diagnostics() {
    let o = run(&["corner", "--beta", "0.7853981633974483", "--c", "0.1", "--effort", "1"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let (csv, diag) = text.split_once("\n\n").unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x,phi,dphi,upsilon,t1,t2,r1,r2");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r.len() == 8));
    let d: serde_json::Value = serde_json::from_str(diag).unwrap();
    assert!(d["iterations"].as_u64().unwrap() <= 100);
    assert!(d["ode1_residual"].as_f64().unwrap() < 1e-6);
    // φ ≈ c x^{σ+1} at the smallest node
    let sigma = d["sigma"].as_f64().unwrap();
    assert!((rows[0][1] / rows[0][0].powf(sigma + 1.0) - 0.1).abs() < 1e-3);
}
