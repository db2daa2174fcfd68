use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ehmoduli"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn report(dir: &Path, command: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{command}.json"))).unwrap()).unwrap()
}

fn check<'a>(r: &'a Value, name: &str) -> &'a Value {
    r["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()
}

#[test]
fn decompose_reports_both_ambient_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["decompose", "--k", "3", "--l", "1"], dir.path());
    assert!(out.status.success());
    let r = report(dir.path(), "decompose");
    assert_eq!(r["values"]["ambient_dim_orbit"], r["values"]["ambient_dim_isotypic"]);
    assert_eq!(check(&r, "contraction_kernel_dim")["measured"], 11.0);
    assert_eq!(r["pass"], true);
}

#[test]
fn float_backend_decompose_agrees() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["decompose", "--k", "2", "--l", "1", "--backend", "float"], dir.path()).status.success());
}

#[test]
fn verify_standard_map_passes_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--k", "2", "--l", "1", "--norm", "0", "--grid", "12"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let mut rdr = csv::Reader::from_path(dir.path().join("verify_samples.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["z_re", "z_im", "m", "cos_theta", "e", "A11", "A12", "A22", "F"]);
    assert_eq!(rdr.records().count(), 12);
    let r = report(dir.path(), "verify");
    assert!((check(&r, "cos_theta")["measured"].as_f64().unwrap() - 0.2).abs() < 1e-6);
}

#[test]
fn verify_near_boundary_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--k", "3", "--l", "1", "--norm", "0.9", "--seed", "4", "--grid", "10"], dir.path());
    assert!(out.status.success());
    assert_eq!(report(dir.path(), "verify")["values"]["interior"], true);
}

#[test]
fn verify_on_boundary_reports_rank_drop() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--k", "3", "--l", "1", "--norm", "1", "--grid", "10"], dir.path());
    assert!(out.status.success());
    let r = report(dir.path(), "verify");
    assert_eq!(r["values"]["interior"], false);
    assert!(r["values"]["kernel_dim"].as_u64().unwrap() > 0);
    assert!(r["values"]["p"].as_u64().unwrap() < 10);
    assert_eq!(check(&r, "fiber_kernel_overlap")["pass"], true);
}

#[test]
fn invalid_points_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify", "--norm", "1.5"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid D"));
    let out = run(&["verify", "--grid", "4"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["correspond", "--l", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn correspond_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["correspond", "--k", "2", "--l", "1", "--norm", "0.7", "--grid", "8"], dir.path());
    assert!(out.status.success());
    let r = report(dir.path(), "correspond");
    assert!(check(&r, "roundtrip")["measured"].as_f64().unwrap() < 1e-8);
    assert!((check(&r, "lower_energy_ratio")["measured"].as_f64().unwrap() - 2.0).abs() < 1e-3);
}

#[test]
fn gauss_reports_both_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["gauss", "--k", "2", "--l", "0", "--grid", "8"], dir.path());
    let r = report(dir.path(), "gauss");
    // the identity as stated does not hold; the exit code says so
    assert_eq!(check(&r, "identity_residual")["pass"], false);
    assert_eq!(out.status.code(), Some(1));
    assert!(r["values"]["corrected_identity_residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(check(&r, "gauss_map_degree")["pass"], true);
}

#[test]
fn reports_are_reproducible_up_to_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--k", "3", "--l", "0", "--norm", "0.6", "--seed", "11", "--grid", "9"];
    let snapshot = || {
        run(&args, dir.path());
        let text = std::fs::read_to_string(dir.path().join("verify.json")).unwrap();
        let kept: Vec<&str> = text.lines().filter(|l| !l.contains("\"timestamp\"")).collect();
        (kept.join("\n"), std::fs::read(dir.path().join("verify_samples.csv")).unwrap())
    };
    assert_eq!(snapshot(), snapshot());
}

#[test]
fn report_keys_are_sorted() {
    let dir = tempfile::tempdir().unwrap();
    run(&["decompose", "--k", "1", "--l", "0"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("decompose.json")).unwrap();
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
    assert!(top.contains(&"provenance") && top.contains(&"timestamp"));
}

#[test]
fn config_file_and_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"k": 1, "l": 1, "grid": 8, "tolerances": {"ratio": 0.01}}"#).unwrap();
    let out_dir = dir.path().join("env_out");
    let out = Command::new(env!("CARGO_BIN_EXE_ehmoduli"))
        .args(["verify", "--norm", "0.3", "--config"])
        .arg(&cfg)
        .env("EHMODULI_OUT_DIR", &out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out_dir, "verify");
    assert_eq!(r["config"]["l"], 1);
    assert_eq!(r["config"]["norm"], 0.3);
    assert_eq!(check(&r, "energy_ratio")["tolerance"], 0.01);
    assert_eq!(check(&r, "energy_ratio")["expected"], 7.0);
}
