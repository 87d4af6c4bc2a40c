use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn secrelay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_secrelay"))
        .args(args)
        .env_remove("CRB_SEED")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

const ORTHOGONAL: &str = r#"{"g": [[1, 0], [1, 0]], "h": [[1, 0], [0, 0]], "z": [[0, 0], [1, 0]],
    "n_relays": [1, 1], "n0": 1}"#;

const RANDOM_M2: &str = r#"{"g": [[1, 0], [1, 0]], "h": [[0.8, -0.3], [-0.2, 1.1]],
    "z": [[0.4, 0.6], [0.9, -0.1]], "n_relays": [1, 1], "n0": 1}"#;

#[test]
fn solve_total_on_orthogonal_channels() {
    let dir = tempfile::tempdir().unwrap();
    let ch = write(dir.path(), "ch.json", ORTHOGONAL);
    let v = json(&secrelay(&["solve", &ch, "--method", "total", "--pt", "4"]));
    assert!((v["rate"].as_f64().unwrap() - 5f64.log2()).abs() < 1e-9);
    assert_eq!(v["unit"], "bits");
    let w = v["w"].as_array().unwrap();
    assert!((w[0][0].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(w[1][0].as_f64().unwrap().abs() < 1e-9);

    let nats = json(&secrelay(&[
        "solve", &ch, "--method", "total", "--pt", "4", "--nats",
    ]));
    assert!((nats["rate"].as_f64().unwrap() - 5f64.ln()).abs() < 1e-9);
    let quiet = json(&secrelay(&["solve", &ch, "--pt", "4", "--n0", "4"]));
    assert!((quiet["rate"].as_f64().unwrap() - 2f64.log2()).abs() < 1e-9);
}

#[test]
fn oracle_agrees_with_individual_solver() {
    let dir = tempfile::tempdir().unwrap();
    let ch = write(dir.path(), "ch.json", RANDOM_M2);
    let solved = json(&secrelay(&[
        "solve",
        &ch,
        "--method",
        "individual-sdr",
        "--budgets",
        "1,1",
    ]));
    let oracle = json(&secrelay(&[
        "oracle",
        &ch,
        "--resolution",
        "64",
        "--budgets",
        "1,1",
    ]));
    let (s, o) = (
        solved["rate"].as_f64().unwrap(),
        oracle["rate"].as_f64().unwrap(),
    );
    assert!((s - o).abs() < 1e-3 && o <= s + 1e-6, "{s} vs {o}");
    assert!(solved["t_max"].as_f64().unwrap() > 1.0);
}

#[test]
fn sweep_writes_csv_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.json",
        r#"{"fading": {"sigma_h": 3.0, "sigma_z": 1.0, "relays": 3}, "n0": 1.0,
            "sweep": {"variable": "P_T", "grid": [1.0, 4.0]},
            "methods": ["total", "suboptimal"], "trials": 5, "seed": 2}"#,
    );
    let out = dir.path().join("out.csv");
    let status = secrelay(&["sweep", &cfg, "--out", out.to_str().unwrap()]);
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
    let stdout = secrelay(&["sweep", &cfg]);
    assert_eq!(String::from_utf8(stdout.stdout).unwrap(), csv);

    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"fading": {"sigma_h": 3.0, "sigma_z": 1.0, "relays": 3}, "n0": 1.0,
            "sweep": {"variable": "P_T"}, "trials": 0}"#,
    );
    let res = secrelay(&["sweep", &bad]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("trials"));
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let ch = write(dir.path(), "ch.json", ORTHOGONAL);
    assert_eq!(secrelay(&["solve", &ch]).status.code(), Some(1));
    assert_eq!(
        secrelay(&["solve", &ch, "--pt", "-1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        secrelay(&["solve", &ch, "--method", "bogus", "--pt", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        secrelay(&[
            "solve",
            &ch,
            "--budgets",
            "1,1,1",
            "--method",
            "individual-socp"
        ])
        .status
        .code(),
        Some(1)
    );
    let broken = write(dir.path(), "broken.json", "{\"h\": [[1, 0]]");
    assert_eq!(
        secrelay(&["solve", &broken, "--pt", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(secrelay(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(secrelay(&["--help"]).status.code(), Some(0));
}
