//! End-to-end CLI tests: exit codes, JSON shape, determinism.

use std::io::Write;
use std::process::{Command, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iterext"))
}

fn write_map(dir: &std::path::Path, name: &str, num: &[&str], den: &[&str]) -> String {
    let path = dir.join(name);
    let body = serde_json::json!({ "num": num, "den": den });
    std::fs::write(&path, body.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("iterext-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn analyze_pcf_map_exits_zero() {
    let dir = tempdir();
    let map = write_map(&dir, "x2m1.json", &["-1", "0", "1"], &["1"]);
    let out = bin()
        .args(["analyze", "--map", &map])
        .output()
        .expect("spawn");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pcf"]["verdict"], "PCF");
    // infinity fixed, 0 of period 2
    let orbits = v["pcf"]["orbits"].as_array().unwrap();
    assert!(orbits
        .iter()
        .any(|o| o["point"] == "inf" && o["period"] == 1));
    assert!(orbits.iter().any(|o| o["point"] == "0" && o["period"] == 2));
}

#[test]
fn verify_roots_square_map() {
    let dir = tempdir();
    let map = write_map(&dir, "xsq.json", &["0", "0", "1"], &["1"]);
    let out = bin()
        .args([
            "verify-roots",
            "--map",
            &map,
            "--base",
            "2",
            "--m",
            "2",
            "--j",
            "1",
        ])
        .output()
        .expect("spawn");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ok"], true);
    let w = &v["unity_witness"]["witness"];
    assert_eq!(w["level"], 1);
    assert!((w["value_re"].as_f64().unwrap() + 1.0).abs() < 1e-9);
}

#[test]
fn apf_octic_certificate_passes() {
    let dir = tempdir();
    let map = write_map(
        &dir,
        "example43.json",
        &[
            "251", "-1016", "1790", "-1792", "1120", "-448", "112", "-16", "1",
        ],
        &["1"],
    );
    let out = bin()
        .args(["apf", "--map", &map, "--prime", "2", "--depth", "3"])
        .output()
        .expect("spawn");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let cert = &v["certificate"];
    assert_eq!(cert["verdict"], "pass");
    assert_eq!(cert["m"], 2);
    assert_eq!(cert["r"], 6);
    assert_eq!(cert["levels"].as_array().unwrap().len(), 3);
    for lvl in cert["levels"].as_array().unwrap() {
        assert_eq!(lvl["slope"], "-1/64");
        assert_eq!(lvl["norm_ok"], true);
    }
}

#[test]
fn apf_rejects_non_powerlike_with_exit_one() {
    let dir = tempdir();
    let map = write_map(&dir, "bad.json", &["1", "1", "1"], &["1"]);
    let out = bin()
        .args(["apf", "--map", &map, "--prime", "2"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("m_max"));
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["ramification"]).output().expect("spawn");
    assert_eq!(out.status.code(), Some(2));
    let dir = tempdir();
    let map = write_map(&dir, "ok.json", &["0", "0", "1"], &["1"]);
    let out = bin()
        .args(["apf", "--map", &map, "--tolerance", "7.0"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["apf", "--map", "/nonexistent/file.json"])
        .output()
        .expect("spawn");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ramification_cyclotomic_report() {
    let out = bin()
        .args(["ramification", "--cyclotomic", "2,3"])
        .output()
        .expect("spawn");
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let breaks = v["lower_breaks"].as_array().unwrap();
    assert_eq!(breaks.len(), 2);
    assert_eq!(breaks[0]["break"], "1");
    assert_eq!(breaks[1]["break"], "3");
    assert_eq!(v["upper_breaks"], serde_json::json!(["1", "2"]));
}

#[test]
fn map_accepted_on_stdin() {
    let mut child = bin()
        .args(["analyze", "--map", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .expect("spawn");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(br#"{"num": ["0","0","1"], "den": ["1"]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pcf"]["verdict"], "PCF");
}

#[test]
fn reports_are_deterministic_modulo_timestamp() {
    let dir = tempdir();
    let map = write_map(&dir, "det.json", &["-1", "0", "1"], &["1"]);
    let run = || {
        let out = bin()
            .args([
                "verify-roots",
                "--map",
                &map,
                "--base",
                "3",
                "--m",
                "2",
                "--j",
                "2",
            ])
            .output()
            .expect("spawn");
        assert!(out.status.success());
        let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timestamp");
        serde_json::to_string(&v).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a, b, "reports differ beyond the timestamp");
}

#[test]
fn lattes_subcommand_fiber_check() {
    let out = bin()
        .args([
            "lattes", "--a", "0", "--b", "1", "--d", "2", "--x0", "2", "--n", "1",
        ])
        .output()
        .expect("spawn");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["degree"], 4);
    assert_eq!(v["multiplication_composition_law"], true);
    assert_eq!(v["fiber_check"]["fiber_mass"], 4);
}

#[test]
fn chebyshev_subcommand() {
    let out = bin()
        .args(["chebyshev", "--d", "3", "--base", "1", "--n", "1"])
        .output()
        .expect("spawn");
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["semiconjugate_to_power_map"], true);
    let trace = &v["trace_witness"];
    assert!((trace["value_re"].as_f64().unwrap() + 1.0).abs() < 1e-10);
}
