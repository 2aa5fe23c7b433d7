use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_toricwall")).args(args).output().expect("binary runs");
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap_or(-1), report, String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn wall_of_the_flop() {
    let (code, r, _) = run(&["wall", "flop"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["e"], serde_json::json!(["1"]));
    assert_eq!(r["results"]["w"], 1);
    assert_eq!(r["results"]["conifold"], "1");
    assert_eq!(r["problem"]["characters"], serde_json::json!([["1"], ["1"], ["-1"], ["-1"]]));
}

#[test]
fn verify_fm_passes_on_c3z3() {
    let (code, r, err) = run(&["verify-fm", "c3z3", "--draws", "20", "--tol", "1e-9"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(r["pass"], true);
    assert_eq!(r["results"]["draws"].as_array().unwrap().len(), 20);
    assert!(r["deviations"]["diagram"].as_f64().unwrap() < 1e-9);
}

#[test]
fn mb_verify_passes_on_the_flop() {
    let (code, r, err) = run(&["mb-verify", "flop", "--y", "2.0", "--tol", "1e-6"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(r["tolerances"]["deviation"], 1e-6);
    let rows = r["results"]["rows"].as_array().unwrap();
    assert!(rows.iter().any(|x| x["kind"] == "outside" && x["hypergeometric_deviation"].as_f64().unwrap() < 1e-6));
}

#[test]
fn tight_tolerance_fails_with_exit_one() {
    let (code, r, _) = run(&["mb-verify", "flop", "--y", "2.0", "--tol", "1e-30"]);
    assert_eq!(code, 1);
    assert_eq!(r["pass"], false);
    assert!(r.get("error").is_none());
}

#[test]
fn errors_carry_stable_codes() {
    let (code, r, _) = run(&["wall", "noncrepant"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["code"], "not_crepant");
    let (code, r, _) = run(&["frobnicate", "flop"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["code"], "unknown_command");
    let (code, r, _) = run(&["wall", "/nonexistent/problem.json"]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["code"], "parse_error");
}

#[test]
fn invalid_problem_file_reports_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"rank": 1, "characters": [[1], ["1/2"]], "omega_plus": [1]}"#).unwrap();
    let (code, r, _) = run(&["chambers", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["code"], "validation_error");
    assert!(r["error"]["message"].as_str().unwrap().contains("characters[1][0]"));
}

#[test]
fn output_file_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let (code, _, _) = run(&["all", "rank2", "--seed", "9", "--draws", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let r: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(r["seed"], 9);
}

#[test]
fn window_flags_reach_the_series() {
    let (code, r, _) = run(&["verify-ih", "p1", "--trunc-y", "1", "--trunc-z", "-1:0"]);
    assert_eq!(code, 0);
    assert_eq!(r["results"]["window"], serde_json::json!({"y_degree": 1, "z_low": -1, "z_high": 0}));
}

#[test]
fn examples_are_listed() {
    let out = Command::new(env!("CARGO_BIN_EXE_toricwall")).arg("examples").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["p1", "flop", "c3z3", "gerbe", "rank2", "noncrepant", "flop_over_p1"] {
        assert!(text.lines().any(|l| l == name));
    }
}
