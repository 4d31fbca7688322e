use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn heatbounds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatbounds")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let i = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[i].parse().unwrap()).collect()
}

#[test]
fn thm1_flat_value() {
    let o = heatbounds(&["bounds", "--name", "thm1", "--K", "0", "--t", "1"]);
    assert!(o.status.success());
    let v = column(&stdout(&o), "value");
    assert_eq!(v.len(), 1);
    assert!((v[0] - 0.797885).abs() < 1e-6);
}

#[test]
fn thm1_grid_has_fifty_rows() {
    let o = heatbounds(&["bounds", "--name", "thm1", "--K", "-1", "--t", "0.1:10:50"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 50);
    let v = column(&stdout(&o), "value");
    assert!(v.windows(2).all(|w| w[1] < w[0]), "bound decreases in t for K = -1 until it levels off");
}

#[test]
fn cor_min_reports_eight_over_pi() {
    let o = heatbounds(&["bounds", "--name", "cor-min", "--K", "0", "--u", "1", "--Lu", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let squared = column(&out, "squared")[0];
    assert!((squared - 8.0 / std::f64::consts::PI).abs() < 1e-12);
    assert!((column(&out, "value")[0] - squared.sqrt()).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bounds", "--name", "nope"][..],
        &["bounds", "--name", "thm1", "--K", "0"],
        &["bounds", "--name", "thm1", "--K", "0", "--t", "log:0:1:3"],
        &["mc", "--model", "euclid1", "--t", "1", "--x", "0", "--paths", "0"],
        &["mc", "--model", "ball2", "--bc", "neumann", "--estimator", "bismut", "--t", "1", "--x", "0,0", "--paths", "10"],
        &["mc", "--model", "interval", "--t", "1", "--x", "1", "--paths", "10"],
        &["verify", "--suite", "unknown"],
        &["spectral", "--domain", "torus"],
        &["frobnicate"],
    ] {
        let o = heatbounds(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn invalid_combination_message_is_actionable() {
    let o = heatbounds(&["mc", "--model", "interval", "--bc", "dirichlet", "--estimator", "bismut", "--t", "1", "--x", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--estimator fd"));
}

#[test]
fn bismut_gaussian_and_json_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = heatbounds(&[
        "mc", "--model", "euclid1", "--estimator", "bismut", "--t", "1", "--x", "0", "--paths", "100000", "--seed", "42", "--dt",
        "1", "--out", out,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("mc.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 42);
    let g = &report["gradient"];
    let (norm, se) = (g["norm"].as_f64().unwrap(), g["norm_se"].as_f64().unwrap());
    let exact = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    assert!((norm - exact).abs() < 3.0 * se, "{norm} ± {se}");
    assert_eq!(report["passed"], true);
}

#[test]
fn dirichlet_semigroup_matches_sine_mode() {
    let o = heatbounds(&[
        "mc", "--model", "interval", "--bc", "dirichlet", "--estimator", "semigroup", "--u", "sin", "--t", "1", "--x", "1", "--paths",
        "20000", "--seed", "3",
    ]);
    assert!(o.status.success());
    let line = stdout(&o).lines().next().unwrap().to_string();
    let nums: Vec<f64> = line.split_whitespace().filter_map(|w| w.parse().ok()).collect();
    let (mean, se) = (nums[0], nums[1]);
    let exact = (-0.5f64).exp() * 1f64.sin();
    assert!((mean - exact).abs() < 3.0 * se + 0.005, "{mean} ± {se} vs {exact}");
}

#[test]
fn spectral_dirichlet_slopes() {
    let o = heatbounds(&["spectral", "--domain", "interval", "--bc", "dirichlet", "--lmax", "64", "--resolution", "4001"]);
    assert!(o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    let slope = |name: &str| -> f64 {
        let tail = &err[err.find(name).unwrap() + name.len()..];
        tail.split([',', ';']).next().unwrap().trim().parse().unwrap()
    };
    assert!((slope("gradient") - 1.0).abs() < 0.1);
    assert!((slope("laplacian") - 2.0).abs() < 0.1);
    assert!(slope("sup ").abs() < 0.1);
    assert_eq!(csv_rows(&stdout(&o)).len(), 64);
}

#[test]
fn verify_passes_and_embeds_seed() {
    let o = heatbounds(&["verify", "--suite", "iso-interval,eigen-sphere", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["seed"], 7);
    assert_eq!(report["passed"], true);
    assert_eq!(report["experiments"].as_array().unwrap().len(), 2);
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("out");
    write(&cfg, &format!(r#"{{"name": "thm1", "K": -1, "t": "log:0.01:10:5", "out": {:?}, "format": ["csv", "json", "svg"]}}"#, out));
    let o = heatbounds(&["bounds", "--config", cfg.to_str().unwrap(), "--K", "0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(column(&stdout(&o), "K").iter().all(|k| *k == 0.0), "command line wins");
    assert_eq!(csv_rows(&stdout(&o)).len(), 5);
    let json: Value = serde_json::from_str(&std::fs::read_to_string(out.join("thm1.json")).unwrap()).unwrap();
    assert_eq!(json["provenance"]["params"]["K"], "0");
    assert!(json["provenance"]["config_file"].as_str().unwrap().ends_with("run.json"));
    assert!(std::fs::read_to_string(out.join("thm1.svg")).unwrap().contains("<polyline"));
    assert_eq!(std::fs::read_to_string(out.join("thm1.csv")).unwrap(), stdout(&o));
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(&cfg, r#"{"name": "thm1", "K": 0, "t": 1, "colour": "blue"}"#);
    let o = heatbounds(&["bounds", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn thread_cap_keeps_results_identical() {
    let args = ["mc", "--model", "sphere2", "--estimator", "bismut", "--u", "height", "--t", "0.5", "--x", "1,0,0", "--paths", "3000", "--seed", "5"];
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_heatbounds")).args(args).env("HEATBOUNDS_THREADS", threads).output().unwrap();
        assert!(o.status.success());
        stdout(&o).lines().take(2).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(run("1"), run("3"));
    let bad = Command::new(env!("CARGO_BIN_EXE_heatbounds")).args(args).env("HEATBOUNDS_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
