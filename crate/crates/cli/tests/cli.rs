use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qutritlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qutritlab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn every_experiment_runs_with_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    for exp in
        ["chi-curve", "spectroscopy", "spiral", "ramsey", "state-tomo", "process-tomo", "contextuality", "sweet-spot"]
    {
        let out = tmp.path().join(exp);
        let res = qutritlab(&[exp, "--seed", "4", "--out", out.to_str().unwrap()]);
        assert!(res.status.success(), "{exp}: {}", String::from_utf8_lossy(&res.stderr));
        let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
        assert_eq!(report["header"]["experiment"], exp);
        assert_eq!(report["header"]["seed"], 4);
        let hash = report["header"]["config_hash"].as_str().unwrap().to_string();
        for entry in report["files"].as_array().unwrap() {
            let text = fs::read_to_string(out.join(entry["path"].as_str().unwrap())).unwrap();
            assert!(text.contains(&hash), "{exp}: {} lacks the config hash", entry["path"]);
        }
    }
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"shots": 500, "spiral": {"points": 6}}"#);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    for (dir, seed) in [(&a, "9"), (&b, "9"), (&c, "10")] {
        let res = qutritlab(&["spiral", "--config", &cfg, "--seed", seed, "--out", dir.to_str().unwrap()]);
        assert!(res.status.success());
    }
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&b));
    assert_ne!(fs::read(a.join("spiral.csv")).unwrap(), fs::read(c.join("spiral.csv")).unwrap());
}

#[test]
fn config_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out = out.to_str().unwrap();
    let unknown_key = write_config(tmp.path(), r#"{"ramsey": {"delay": 3}}"#);
    assert_eq!(qutritlab(&["ramsey", "--config", &unknown_key, "--out", out]).status.code(), Some(2));
    assert_eq!(qutritlab(&["no-such-experiment", "--out", out]).status.code(), Some(2));
    let missing = tmp.path().join("missing.json");
    assert_eq!(qutritlab(&["ramsey", "--config", missing.to_str().unwrap(), "--out", out]).status.code(), Some(2));
    let unphysical = write_config(tmp.path(), r#"{"noise": {"t2_12": 1000}}"#);
    assert_eq!(qutritlab(&["ramsey", "--config", &unphysical, "--out", out]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), r#"{"chi_curve": {"delta_min": -900, "delta_max": -700, "points": 11}}"#);
    let out = tmp.path().join("out");
    let res = qutritlab(&["chi-curve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));
}

#[test]
fn config_out_dir_is_used_without_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let target = tmp.path().join("from-config");
    let cfg = write_config(tmp.path(), &format!(r#"{{"out_dir": {:?}}}"#, target.to_str().unwrap()));
    let res = qutritlab(&["sweet-spot", "--config", &cfg]);
    assert!(res.status.success());
    assert!(target.join("sweet_spot.csv").exists());
}
