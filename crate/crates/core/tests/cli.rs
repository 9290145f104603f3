mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pucci-lab"))
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn eig_pucci_canonical_passes() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["eig-pucci", "--config"])
        .arg(common::configs_dir().join("eig_pucci.toml"))
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let m = manifest(out.path());
    assert_eq!(m["status"], "pass");
    let lambda = m["results"]["eigenpair"]["lambda"].as_f64().unwrap();
    assert!((lambda - 1.0).abs() < 1e-3);
}

#[test]
fn exhaust_canonical_writes_twelve_rows() {
    let out = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["exhaust", "--config"])
        .arg(common::configs_dir().join("exhaust.toml"))
        .arg("--out")
        .arg(out.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let mut r = csv::Reader::from_path(out.path().join("exhaustion.csv")).unwrap();
    let h = r.headers().unwrap().clone();
    assert_eq!(&h[0], "config_hash");
    let col = h.iter().position(|c| c == "lambda").unwrap();
    let lambdas: Vec<f64> = r.records().map(|x| x.unwrap()[col].parse().unwrap()).collect();
    assert_eq!(lambdas.len(), 12);
    assert!(lambdas.windows(2).all(|w| w[1] <= w[0]));
}

const SIM: &str = r#"
[domain]
kind = "interval"
a = 0
b = 1
[bounds]
theta = 1.0
Theta = 2.0
[simulate]
horizon = 1.0
n_paths = 0
"#;

#[test]
fn zero_paths_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SIM);
    let out = dir.path().join("out");
    let status = bin()
        .arg("simulate")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    let m = manifest(&out);
    assert_eq!(m["status"], "error");
    assert_eq!(m["error"]["kind"], "config-error");
    assert!(m["error"]["message"].as_str().unwrap().contains("simulate.n_paths"));
}

#[test]
fn unknown_key_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SIM.replace("theta = 1.0", "thetta = 1.0"));
    let out = dir.path().join("out");
    let o = bin()
        .arg("simulate")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("thetta"));
}

#[test]
fn reversed_envelope_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SIM.replace("theta = 1.0", "theta = 3.0"));
    let out = dir.path().join("out");
    let status = bin()
        .arg("simulate")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(manifest(&out)["error"]["message"].as_str().unwrap().contains("θ < Θ"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::configs_dir().join("eig_pucci.toml");
    let run = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        bin()
            .arg("eig-pucci")
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--seed", seed, "--threads", "1"])
            .status()
            .unwrap();
        manifest(&out)
    };
    let a = run("1", "a");
    let b = run("2", "b");
    assert_eq!(a["config"]["seed"], 1);
    assert_eq!(b["config"]["seed"], 2);
    assert_ne!(a["config_hash"], b["config_hash"]);
}

#[test]
fn command_must_match_config() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .arg("saddle")
        .arg("--config")
        .arg(common::configs_dir().join("eig_pucci.toml"))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
