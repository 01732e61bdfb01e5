//! End-to-end runs of the `fbt` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn out_dir(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&d);
    d
}

fn fbt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fbt"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path, command: &str) -> Value {
    let text = fs::read_to_string(dir.join(format!("{command}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn transmission_peaks_split_at_high_cmp() {
    let dir = out_dir("transmission");
    let o = fbt(
        &dir,
        &[
            "transmission",
            "--beta",
            "1",
            "--cmp",
            "10",
            "--points",
            "4001",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&dir, "transmission");
    let panel = &rep["panels"][0];
    assert!((panel["max_t_inf"].as_f64().unwrap() - 1.0).abs() < 1e-4);
    let peaks: Vec<f64> = panel["optimal_detunings_over_gamma_prime"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(peaks.len(), 2);
    for p in peaks {
        assert!((p.abs() - 1.5).abs() < 1e-9, "{p}");
    }
    assert_eq!(rep["params"]["reduced"]["cmp"], 10.0);
    assert!(dir.join("transmission.csv").exists());
    assert!(dir.join("transmission_manifest.json").exists());
    assert!(!dir.join("transmission.svg").exists());
}

#[test]
fn noise_sweep_reports_gold_square_ratio() {
    let dir = out_dir("noise");
    let o = fbt(&dir, &["noise-sweep", "--points", "5"]);
    assert!(o.status.success());
    let rep = report(&dir, "noise_sweep");
    let ratio = rep["vacuum_ratio"].as_f64().unwrap();
    assert!((ratio / 3.4 - 1.0).abs() < 0.05, "{ratio}");
    assert_eq!(rep["params"]["source"], "command-default");
}

#[test]
fn reruns_are_byte_identical() {
    let a = out_dir("det_a");
    let b = out_dir("det_b");
    for d in [&a, &b] {
        let o = fbt(d, &["--format", "all", "tv-diagram", "--samples", "21"]);
        assert!(o.status.success());
    }
    for f in ["tv_diagram.csv", "tv_diagram.svg", "tv_diagram.json"] {
        let x = fs::read(a.join(f)).unwrap();
        let y = fs::read(b.join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn unknown_preset_reports_json_error() {
    let dir = out_dir("bad");
    let o = fbt(&dir, &["--preset", "nope", "presets"]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "unknown_preset");
    assert!(err["message"].as_str().unwrap().contains("nope"));
}

#[test]
fn config_file_sets_params_and_seed() {
    let dir = out_dir("config");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    fs::write(
        &cfg,
        "preset = \"gold_square\"\nseed = 99\n[params]\neta_d = 0.5\n",
    )
    .unwrap();
    let o = fbt(
        &dir,
        &[
            "--config",
            cfg.to_str().unwrap(),
            "entanglement",
            "--points",
            "3",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = report(&dir, "entanglement");
    assert_eq!(rep["seed"], 99);
    assert_eq!(rep["params"]["reduced"]["eta_d"], 0.5);
    assert_eq!(rep["params"]["source"], "preset:gold_square");
}

#[test]
fn reverse_reports_detection_limit() {
    let dir = out_dir("reverse");
    let o = fbt(&dir, &["reverse", "--points", "41"]);
    assert!(o.status.success());
    let rep = report(&dir, "reverse");
    let v = rep["at_sideband"]["noise"].as_f64().unwrap();
    let lim = rep["detection_limit"].as_f64().unwrap();
    assert!((v - lim).abs() < 1e-3);
    assert!(rep["forward_reverse_max_residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn oracle_failure_sets_exit_code() {
    let dir = out_dir("oracle");
    // Eight segments at a 0.1% tolerance cannot pass.
    let o = fbt(
        &dir,
        &["oracle-validate", "--segments", "8", "--tol", "0.001"],
    );
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(report(&dir, "oracle_validate")["verdict"], "fail");
}
