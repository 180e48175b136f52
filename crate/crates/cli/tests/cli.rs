use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gridnls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridnls")).args(args).output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn minimize_writes_result_json() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run.json");
    let out = gridnls(&["minimize", "--p", "3", "--mass", "1", "--half-width", "20", "--mesh", "16", "--out", path(&run)]);
    let v = json_stdout(&out);
    let file: Value = serde_json::from_str(&fs::read_to_string(&run).unwrap()).unwrap();
    assert_eq!(v, file);
    for key in ["p", "mu", "status", "energy", "iters", "grad_norm", "L", "m", "init", "seed"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["status"], "Converged");
    assert!(v["energy"].as_f64().unwrap() < 0.0);
    assert_eq!(v["L"], 20);
    assert_eq!(v["m"], 16);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = gridnls(&["minimize", "--p", "3", "--mass", "1", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(gridnls(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gridnls(&["minimize", "--p", "3"]).status.code(), Some(2));
}

#[test]
fn computation_and_validation_exit_codes() {
    let out = gridnls(&["critical-mass", "--p", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = gridnls(&["minimize", "--p", "7", "--mass", "1", "--half-width", "2", "--mesh", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"p": 4.0, "mass": 0.5, "half_width": 4, "mesh": 4, "max_iters": 50}"#).unwrap();
    let v = json_stdout(&gridnls(&["minimize", "--config", path(&cfg), "--p", "3"]));
    assert_eq!(v["p"], 3.0);
    assert_eq!(v["mu"], 0.5);
    assert_eq!(v["L"], 4);
    assert!(v["iters"].as_u64().unwrap() <= 50);

    fs::write(&cfg, r#"{"p": 4.0, "unknown_key": 1}"#).unwrap();
    assert_eq!(gridnls(&["minimize", "--config", path(&cfg)]).status.code(), Some(2));
    assert_eq!(gridnls(&["minimize", "--config", path(&dir.path().join("absent.json"))]).status.code(), Some(2));
}

#[test]
fn kp_at_six_is_near_the_edge_soliton_constant() {
    let v = json_stdout(&gridnls(&["kp", "--p", "6"]));
    let k = v["estimate"].as_f64().unwrap();
    let k_r = 4.0 / std::f64::consts::PI.powi(2);
    assert!((k - k_r).abs() < 2e-3, "K_6 = {k}, expected about {k_r}");
    assert!(k <= k_r + 1e-9);
}

#[test]
fn check_reports_no_negative_slack() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("check.csv");
    let out = gridnls(&["check", "--samples", "1000", "--seed", "7", "--out", path(&csv)]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, fs::read_to_string(&csv).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sample_id,name,p,alpha,lhs,rhs,slack"));
    let mut ids = std::collections::BTreeSet::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 7, "{line}");
        ids.insert(f[0].parse::<usize>().unwrap());
        let slack: f64 = f[6].parse().unwrap();
        assert!(slack >= 0.0, "{line}");
    }
    assert_eq!(ids.len(), 1000);
}

#[test]
fn sweep_is_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let csv = dir.path().join(format!("sweep{threads}.csv"));
        let out = gridnls(&[
            "sweep", "--p-range", "3,5", "--mu-range", "0.5,1,2", "--half-width", "4", "--mesh", "4", "--seed", "3",
            "--perturbation", "1e-3", "--threads", threads, "--out", path(&csv),
        ]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(out.stdout, fs::read(&csv).unwrap());
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    assert!(text.starts_with("p,mu,status,energy,iters,grad_norm\n"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn sweep_rows_are_reproducible_with_minimize() {
    let out = gridnls(&["sweep", "--p-range", "3", "--mu-range", "1", "--half-width", "5", "--mesh", "4", "--seed", "9"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let v = json_stdout(&gridnls(&[
        "minimize", "--p", "3", "--mass", "1", "--half-width", "5", "--mesh", "4", "--seed", "9",
    ]));
    assert_eq!(row[2], v["status"].as_str().unwrap());
    assert_eq!(row[3].parse::<f64>().unwrap(), v["energy"].as_f64().unwrap());
    assert_eq!(row[4].parse::<u64>().unwrap(), v["iters"].as_u64().unwrap());
}

#[test]
fn empty_mu_range_is_rejected() {
    let out = gridnls(&["sweep", "--p-range", "3", "--mu-range", ""]);
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn testfn_dump_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    let v = json_stdout(&gridnls(&["testfn", "--eps", "1", "--mass", "2", "--mesh", "64", "--dump", path(&csv)]));
    let mass = &v["mass"];
    assert!((mass["discrete"].as_f64().unwrap() - 2.0).abs() < 1e-4);
    assert_eq!(mass["closed_form"], 2.0);
    for row in v["lp"].as_array().unwrap() {
        let d = row["lp_power"]["discrete"].as_f64().unwrap();
        let c = row["lp_power"]["closed_form"].as_f64().unwrap();
        assert!((d - c).abs() < 1e-3 * c.max(1.0), "{row}");
    }
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("edge_id,local_s,value\n"));
    let meta: Value = serde_json::from_str(&fs::read_to_string(csv.with_extension("json")).unwrap()).unwrap();
    assert_eq!(meta["m"], 64);
    assert_eq!(meta["mass"].as_f64().unwrap(), mass["discrete"].as_f64().unwrap());

    let v = json_stdout(&gridnls(&["testfn", "--family", "soliton", "--eps-scale", "0.1"]));
    let q6 = v["q6"]["discrete"].as_f64().unwrap();
    assert!(q6 > 0.4 && q6 <= v["q6"]["closed_form"].as_f64().unwrap() + 1e-9);
}
