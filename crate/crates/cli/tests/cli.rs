use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn shimura(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shimura"))
        .args(args)
        .current_dir(workspace())
        .output()
        .expect("binary runs")
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn result_of(out: &Output) -> Value {
    let line = String::from_utf8_lossy(&out.stdout);
    let record: Value = serde_json::from_str(line.trim()).expect("one JSON line");
    for key in ["tool_version", "config_echo", "timing"] {
        assert!(record.get(key).is_some(), "missing {key}");
    }
    record["result"].clone()
}

#[test]
fn selftest_quick_passes() {
    let out = shimura(&["selftest", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(result_of(&out)["pass"], true);
}

#[test]
fn threshold_report_echoes_constants() {
    let out = shimura(&["audit", "threshold", "--k", "2", "--d", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = result_of(&out);
    assert_eq!(r["p_threshold"], 409);
    for key in ["c1", "c2", "c_r", "radius_log_factor", "c_prime_dot_f", "p_max"] {
        assert!(r["assumptions"].get(key).is_some(), "{key}");
    }
}

#[test]
fn conj_verify_emits_bound_reports() {
    let out = shimura(&["volume", "verify", "--curve", "graph_conj", "--bound", "conj", "--r", "0.3", "--R", "0.6"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = result_of(&out);
    assert_eq!(reports.as_array().unwrap().len(), 2);
    assert!((reports[0]["bound_value"].as_f64().unwrap() - 2.022542).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    assert_eq!(shimura(&["bogus"]).status.code(), Some(2));
    assert_eq!(shimura(&["cm"]).status.code(), Some(2));
    // p = 3 divides the discriminant
    assert_eq!(shimura(&["cm", "--p", "3"]).status.code(), Some(1));
    assert_eq!(shimura(&["audit", "genus", "--d", "1", "--p", "5"]).status.code(), Some(1));
}

#[test]
fn output_is_deterministic_across_threads() {
    let a = shimura(&["cm", "--p", "5", "--no-timing", "--threads", "1"]);
    let b = shimura(&["cm", "--p", "5", "--no-timing", "--threads", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_output() {
    let out = shimura(&["audit", "table", "--csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("components,d,genus_over_p3,genus_per_component,p"), "{text}");
    assert!(text.contains("p divides d"));
}

#[test]
fn bundled_golden_suites_pass() {
    for suite in ["cm", "hecke", "audit"] {
        let out = shimura(&["golden", "check", "--suite", suite]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn perturbed_golden_fails_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(shimura(&["golden", "record", "--suite", "audit", "--dir", d]).status.code(), Some(0));
    assert_eq!(shimura(&["golden", "check", "--suite", "audit", "--dir", d]).status.code(), Some(0));
    let file = dir.path().join("audit/threshold_k2_d6.json");
    let text = std::fs::read_to_string(&file).unwrap().replace("409", "401");
    std::fs::write(&file, text).unwrap();
    let out = shimura(&["golden", "check", "--suite", "audit", "--dir", d]);
    assert_eq!(out.status.code(), Some(1));
    let diffs = result_of(&out)["diffs"].clone();
    assert_eq!(diffs[0], "threshold_k2_d6: $.p_threshold: expected 401, got 409");
}
