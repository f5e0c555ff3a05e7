use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ballspace"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn csv_values(text: &str) -> Vec<(i8, f64)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let parts: Vec<&str> = l.split(',').collect();
            let ln = match parts[2] {
                "-inf" => f64::NEG_INFINITY,
                s => s.parse().unwrap(),
            };
            (parts[1].parse().unwrap(), ln)
        })
        .collect()
}

#[test]
fn norms_examples() {
    let v = json_of(&run(&["norms", "--space", "ball:2", "--alpha", "1,0"]));
    assert_eq!(v["value"].as_f64().unwrap(), 0.5);
    let v = json_of(&run(&["norms", "--space", "disk:1", "--k", "2"]));
    assert!((v["value"].as_f64().unwrap() - 1.0 / 12.0).abs() < 1e-16);
    let v = json_of(&run(&["norms", "--space", "ball:2", "--alpha", "0,0"]));
    assert_eq!(v["value"].as_f64().unwrap(), 1.0);
    let v = json_of(&run(&["norms", "--space", "ball:3", "--alpha", "2,1,0"]));
    assert!((v["value"].as_f64().unwrap() - 1.0 / 30.0).abs() < 1e-16);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["norms", "--space", "ball:2", "--alpha", "1,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["norms", "--space", "cube:2", "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(&["kernel", "coeffs", "--c", "1", "--r", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let out = bin()
        .env("BALLSPACE_THREADS", "0")
        .args(["norms", "--space", "ball:2", "--k", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .env("BALLSPACE_THREADS", "1")
        .args(["norms", "--space", "ball:2", "--k", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn kernel_commands() {
    let out = run(&["kernel", "coeffs", "--d", "2", "--c", "1", "--r", "0", "--N", "4"]);
    assert!(out.status.success());
    let rows = csv_values(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0], (1, 1.0));
    assert!(rows[1..].iter().all(|&(s, _)| s == 0));

    let v = json_of(&run(&["kernel", "nawrocki", "--d", "2", "--c", "1", "--i", "4096"]));
    let r = v["r_star"].as_f64().unwrap();
    assert!(r > 0.0 && r < 1.0);

    let small = json_of(&run(&["kernel", "drewnowski", "--d", "2", "--c", "0.01", "--r", "0.9"]));
    let large = json_of(&run(&["kernel", "drewnowski", "--d", "2", "--c", "1", "--r", "0.9"]));
    assert!(small["value"].as_f64().unwrap() < large["value"].as_f64().unwrap());

    let v = json_of(&run(&["kernel", "supvn", "--c", "0.125", "--r", "0.97", "--n", "1"]));
    assert_eq!(v["within_limit"], Value::Bool(true));
}

#[test]
fn toeplitz_identity_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.csv", "k,sign,logmag\n0,1,0\n");
    let m = write(dir.path(), "m.csv", "k,sign,logmag\n0,1,0.5\n1,-1,-1\n2,1,-2\n");
    let f_path = dir.path().join("f.csv");
    let out = run(&["kernel", "coeffs", "--c", "0.5", "--r", "0.4", "--N", "60", "--out", f_path.to_str().unwrap()]);
    assert!(out.status.success());
    let f_text = std::fs::read_to_string(&f_path).unwrap();

    let out = run(&["toeplitz", "solve", "--space", "disk:0", "--symbol", &one, "--series", f_path.to_str().unwrap(), "--N", "60"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), f_text);

    let t_path = dir.path().join("t.csv");
    let g_path = dir.path().join("g.csv");
    let rep_path = dir.path().join("rep.json");
    for space in ["disk:0", "disk:3", "ball:2"] {
        let out = run(&[
            "toeplitz", "apply", "--space", space, "--symbol", &m, "--series", f_path.to_str().unwrap(),
            "--N", "60", "--out", t_path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let out = run(&[
            "toeplitz", "solve", "--space", space, "--symbol", &m, "--series", t_path.to_str().unwrap(),
            "--N", "60", "--out", g_path.to_str().unwrap(), "--max-residual", "1e-9",
            "--report", rep_path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let rep: Value = serde_json::from_str(&std::fs::read_to_string(&rep_path).unwrap()).unwrap();
        assert!(rep["residual"].as_f64().unwrap() < 1e-9);
        let want = csv_values(&f_text);
        let got = csv_values(&std::fs::read_to_string(&g_path).unwrap());
        for k in 0..=58 {
            assert_eq!(want[k].0, got[k].0);
            assert!((want[k].1 - got[k].1).abs() < 1e-9, "{space} degree {k}");
        }
    }

    let out = run(&[
        "toeplitz", "solve", "--space", "disk:0", "--symbol", &m, "--series", t_path.to_str().unwrap(),
        "--N", "60", "--max-residual=-1",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn toeplitz_ball_case_report() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        r#"{"d": 2, "terms": [{"alpha": [0, 1], "re": 1, "im": 0}, {"alpha": [1, 1], "re": 1, "im": 0}]}"#,
    );
    let rep = dir.path().join("rep.json");
    let out = run(&[
        "toeplitz", "solve", "--space", "ball:2", "--symbol", &m, "--decay", "0.6", "--N", "150",
        "--report", rep.to_str().unwrap(), "--max-residual", "1e-8",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(v["n"], 1);
    assert!(v["mismatch"].as_f64().unwrap() < 1e-8);
    assert!(v["ln_norm_sq"].as_f64().unwrap() <= v["ln_norm_bound"].as_f64().unwrap());
}

#[test]
fn certificate_build_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "[certificate]\nlevels = 1\n");
    let cert = dir.path().join("cert.json");
    let out = run(&["certificate", "build", "--config", &cfg, "--out", cert.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&cert).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["levels"].as_array().unwrap().len(), 1);
    assert!(v["levels"][0]["gamma_term"].as_f64().unwrap() >= 1.0);
    assert!(v.get("timestamp").is_none());

    let rep = run(&["certificate", "verify", cert.to_str().unwrap()]);
    assert_eq!(json_of(&rep)["passed"], Value::Bool(true));

    let i_n = v["levels"][0]["i_n"].as_u64().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        &text.replace(&format!("\"i_n\": {i_n}"), &format!("\"i_n\": {}", i_n / 2)),
    );
    let out = run(&["certificate", "verify", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("FAIL jz (level 1)"), "{stderr}");

    let out = run(&["certificate", "verify", &write(dir.path(), "junk.json", "{}")]);
    assert_eq!(out.status.code(), Some(2));

    let stamped = dir.path().join("stamped.json");
    let out = run(&[
        "certificate", "build", "--config", &cfg, "--timestamp", "--no-verify", "--out", stamped.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&stamped).unwrap()).unwrap();
    assert!(v["timestamp"].as_u64().is_some());
}

#[test]
fn tight_budget_reports_best_margin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "[certificate]\nlevels = 1\nmax_index = 32\n");
    let out = run(&["certificate", "build", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("best log margin"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", "levelz = 3\n");
    let out = run(&["norms", "--config", &cfg, "--space", "ball:2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn szego_of_a_polynomial_weight() {
    let dir = tempfile::tempdir().unwrap();
    let p = format!(
        "k,sign,logmag\n0,1,{}\n1,-1,0\n2,1,{}\n",
        2f64.ln(),
        0.5f64.ln()
    );
    let w = write(dir.path(), "w.csv", &p);
    let v = json_of(&run(&["szego", "--weight", &w, "--d", "3"]));
    assert!((v["value"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-9);

    let mc = ["szego", "--weight", &w, "--method", "montecarlo", "--samples", "20000", "--seed", "9"];
    let a = run(&mc);
    let b = run(&mc);
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert!((v["value"].as_f64().unwrap() - 2f64.ln()).abs() < 5.0 * v["error"].as_f64().unwrap());
}
