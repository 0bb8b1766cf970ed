use rimbound_cli::{compare, run, ExperimentConfig, Status};
use serde_json::Value;
use std::path::Path;
use std::process::Command;

const HAT_WELL: &str = r#"
task = "surface-spectrum"
seed = 7

[symbol]
kind = "mexican-hat"
p0 = 1.0

[potential]
kind = "gaussian-well"
depth = 1.0
width = 1.0

[surface]
resolution = 64

[rayleigh_ritz]
trials = 3

[oracle]
box_edge = 30.0
grid = 192
k_max = 12
"#;

fn parse(text: &str) -> ExperimentConfig {
    ExperimentConfig::parse(text, Path::new(".")).unwrap()
}

fn with_task(task: &str) -> String {
    HAT_WELL.replace("surface-spectrum", task)
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rimbound"))
}

#[test]
fn surface_spectrum_document() {
    let out = run(&parse(HAT_WELL)).unwrap();
    let doc = &out.document;
    assert_eq!(doc.status, Status::Ok);
    assert_eq!(doc.schema_version, 1);
    assert_eq!(doc.config_sha256.len(), 64);
    let eig = doc.result["eigenvalues"].as_array().unwrap();
    assert_eq!(eig.len(), 64);
    assert!(doc.result["negative_count"].as_u64().unwrap() >= 10);
    assert_eq!(doc.provenance["mesh_size"], 64);
    assert!(out.csv.is_none());
}

#[test]
fn point_test_single_point_is_negative_definite() {
    let text = HAT_WELL.replace("surface-spectrum", "point-test")
        + "\n[point_test]\nangles = [0.0]\n";
    let out = run(&parse(&text)).unwrap();
    assert_eq!(out.document.result["test"]["is_negative_definite"], Value::Bool(true));
    let text = HAT_WELL.replace("surface-spectrum", "point-test") + "\n[point_test]\ncount = 6\n";
    let out = run(&parse(&text)).unwrap();
    assert_eq!(out.document.result["points"].as_array().unwrap().len(), 6);
}

#[test]
fn rayleigh_ritz_sweep_and_csv() {
    let out = run(&parse(&with_task("rayleigh-ritz"))).unwrap();
    assert_eq!(out.document.status, Status::Ok);
    assert_eq!(out.document.result["certified_count"], 3);
    let csv = out.csv.unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "epsilon,j,k,re_h,im_h");
    assert_eq!(lines.len(), 1 + 4 * 9);
    assert_eq!(lines[1].split(',').count(), 5);
}

#[test]
fn rayleigh_ritz_rejects_too_many_trials() {
    let text = with_task("rayleigh-ritz").replace("trials = 3", "trials = 500");
    let err = run(&parse(&text)).unwrap_err().to_string();
    assert!(err.contains("rayleigh_ritz.trials"), "{err}");
}

#[test]
fn bound_count_thresholds_are_monotone() {
    let out = run(&parse(&with_task("bound-count"))).unwrap();
    let counts: Vec<u64> = out.document.result["counts_by_threshold"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["count"].as_u64().unwrap())
        .collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    assert_eq!(out.document.result["certified_count"], 3);
    assert_eq!(out.document.result["refined_mesh_size"], 128);
    assert_eq!(out.document.result["stable_under_doubling"], Value::Bool(true));
}

#[test]
fn spin_orbit_task() {
    let text = HAT_WELL.replace("surface-spectrum", "spin-orbit").replace("trials = 3", "trials = 2")
        + "\n[spin_orbit]\nkind = \"rashba\"\nalpha = 1.0\n";
    let out = run(&parse(&text)).unwrap();
    assert_eq!(out.document.status, Status::Ok);
    let eig = out.document.result["spectrum"]["eigenvalues"].as_array().unwrap();
    assert!((eig[0].as_f64().unwrap() - (-1.3966418094908115)).abs() < 1e-9);
    assert_eq!(out.document.result["certificate"]["certified_count"], 2);
}

#[test]
fn oracle_zero_potential_counts_nothing() {
    let text = with_task("oracle").replace("kind = \"gaussian-well\"\ndepth = 1.0\nwidth = 1.0", "kind = \"zero\"");
    let out = run(&parse(&text)).unwrap();
    assert_eq!(out.document.result["count"], 0);
    assert_eq!(out.exit_code(), 0);
}

#[test]
fn compare_default_holds() {
    let out = compare(&parse(HAT_WELL)).unwrap();
    let r = &out.document.result;
    let certified = r["certified_count"].as_u64().unwrap();
    assert_eq!(certified, 3);
    assert!(r["oracle_count"].as_u64().unwrap() >= certified);
    assert_eq!(out.exit_code(), 0);
}

#[test]
fn compare_zero_potential() {
    let text = HAT_WELL.replace("kind = \"gaussian-well\"\ndepth = 1.0\nwidth = 1.0", "kind = \"zero\"");
    let out = compare(&parse(&text)).unwrap();
    assert_eq!(out.document.result["certified_count"], 0);
    assert_eq!(out.document.result["oracle_count"], 0);
    assert_eq!(out.exit_code(), 0);
}

#[test]
fn compare_stronger_well_weakly_increases() {
    let base = compare(&parse(HAT_WELL)).unwrap();
    let strong = compare(&parse(&HAT_WELL.replace("depth = 1.0", "depth = 4.0"))).unwrap();
    let get = |o: &rimbound_cli::Outcome, k: &str| o.document.result[k].as_u64().unwrap();
    assert!(get(&strong, "certified_count") >= get(&base, "certified_count"));
    assert!(get(&strong, "oracle_count") >= get(&base, "oracle_count"));
    assert_eq!(strong.exit_code(), 0);
}

#[test]
fn binary_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, with_task("rayleigh-ritz")).unwrap();
    let mut outputs = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}"));
        let status = binary()
            .args(["run", cfg.to_str().unwrap(), "--output", out.to_str().unwrap(), "--threads", threads])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        let json = std::fs::read(out.join("rayleigh-ritz.json")).unwrap();
        let csv = std::fs::read(out.join("rayleigh-ritz_sweep.csv")).unwrap();
        outputs.push((json, csv));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn echoed_config_reruns_to_same_document() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, HAT_WELL).unwrap();
    let first = binary().args(["run", cfg.to_str().unwrap(), "--seed", "11"]).output().unwrap();
    assert_eq!(first.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(doc["seed"], 11);
    let echo = dir.path().join("echo.json");
    std::fs::write(&echo, serde_json::to_string(&doc["config"]).unwrap()).unwrap();
    let second = binary().args(["run", echo.to_str().unwrap()]).output().unwrap();
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn certification_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    // a kernel far too weak for the coarsest ε to be negative definite
    let text = with_task("rayleigh-ritz")
        .replace("depth = 1.0", "depth = 1e-5")
        .replace("trials = 3", "trials = 1\nschedule = [1.0]");
    std::fs::write(&cfg, text).unwrap();
    let out = binary().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_config_exits_with_one_and_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, HAT_WELL.replace("grid = 192", "grid = 192\ngird = 3")).unwrap();
    let out = binary().args(["run", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gird"));
}
