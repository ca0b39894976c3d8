//! End-to-end tests of the girg-lab binary: every subcommand, the global
//! flags, and the error paths users actually hit.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_girg-lab"))
}

fn write_config(dir: &Path, value: &Value) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_vec_pretty(value).unwrap()).unwrap();
    path
}

/// A config small enough that every analysis finishes in well under a
/// second; gamma 0.8 is subcritical at tau 2.5, which the validator only
/// admits because allow_subcritical is set.
fn base_config() -> Value {
    json!({
        "model": {"n": 300, "d": 2, "tau": 2.5, "alpha": 1.5, "geometry": "mcd"},
        "gamma": 0.8,
        "c_prime": 0.5,
        "seeds": [1, 2],
        "experiments": ["strips", "cut_contrast"],
        "allow_subcritical": true,
        "cover_trials": 20
    })
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn run_writes_results_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &base_config());
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("wrote"));
    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert!(results.starts_with("experiment,seed,metric,key,value\n"));
    assert!(results.lines().count() > 1);
    let summary: Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["row_count"].as_u64().unwrap() as usize, results.lines().count() - 1);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &base_config());
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out_dir = dir.path().join(name);
        let out = bin()
            .args(["run", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "stderr: {}", stderr_of(&out));
        outputs.push(std::fs::read(out_dir.join("results.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn seed_flag_replaces_the_seed_list() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &base_config());
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["run", "--seed", "7", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let results = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    let seeds: Vec<&str> = results
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .collect();
    assert!(!seeds.is_empty());
    assert!(seeds.iter().all(|&s| s == "7"));
}

#[test]
fn generate_matches_the_naive_reference() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base_config();
    config["seeds"] = json!([5]);
    let config = write_config(dir.path(), &config);
    let fast_dir = dir.path().join("fast");
    let slow_dir = dir.path().join("slow");
    for (out_dir, naive) in [(&fast_dir, false), (&slow_dir, true)] {
        let mut cmd = bin();
        cmd.args(["generate", "--config"]).arg(&config).arg("--out").arg(out_dir);
        if naive {
            cmd.arg("--naive");
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success(), "stderr: {}", stderr_of(&out));
        assert!(stdout_of(&out).contains("graph-5.edges"));
    }
    for ext in ["edges", "verts"] {
        let fast = std::fs::read(fast_dir.join(format!("graph-5.{ext}"))).unwrap();
        let slow = std::fs::read(slow_dir.join(format!("graph-5.{ext}"))).unwrap();
        assert_eq!(fast, slow, "generate --naive diverged on .{ext}");
    }
}

#[test]
fn induce_writes_the_band_subgraph() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base_config();
    config["mode"] = json!("weight_band");
    config["seeds"] = json!([3]);
    let config = write_config(dir.path(), &config);
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["induce", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert!(stdout_of(&out).contains("vertices kept"));
    let header = std::fs::read_to_string(out_dir.join("induced-3.edges")).unwrap();
    assert!(header.starts_with("girg-edges v1 "));
}

#[test]
fn format_json_writes_a_results_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &base_config());
    let out_dir = dir.path().join("out");
    let out = bin()
        .args(["strips", "--format", "json", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let rows: Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("results.json")).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["experiment"] == "strips"));
}

#[test]
fn missing_config_is_an_error() {
    let out = bin().arg("run").output().unwrap();
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("--config is required"));
}

#[test]
fn invalid_model_parameters_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base_config();
    config["model"]["tau"] = json!(1.5);
    let config = write_config(dir.path(), &config);
    let out = bin().args(["run", "--config"]).arg(&config).output().unwrap();
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("tau"));
}

#[test]
fn subcritical_gamma_needs_the_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = base_config();
    config["allow_subcritical"] = json!(false);
    let config = write_config(dir.path(), &config);
    let out = bin().args(["run", "--config"]).arg(&config).output().unwrap();
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("allow_subcritical"));
}

#[test]
fn malformed_config_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, b"{ not json").unwrap();
    let out = bin().args(["run", "--config"]).arg(&path).output().unwrap();
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("config.json"));
}
