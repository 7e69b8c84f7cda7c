use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn udisc(args: &[&str]) -> Output {
    udisc_env(args, &[])
}

fn udisc_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_udisc"));
    cmd.args(args).env_remove("UDISC_TOL");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn example1_high_a_is_locc_achievable() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("run.json");
    let out = udisc(&["run", "example1", "--priors-ab", "0.9", "0.1", "--json", json.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("LOCC verdict at these priors: LOCC_ACHIEVABLE"));
    let report = read_json(&json);
    assert_eq!(report["locc"]["verdict"], "LOCC_ACHIEVABLE");
    assert_eq!(report["classification"]["verdict"], "PRIOR_DEPENDENT");
    let p = floats(&report["solution"]["p_star"]);
    assert!((p[0] - 4.0 / 9.0).abs() < 1e-8, "{p:?}");
    assert!(p[1..].iter().all(|x| x.abs() < 1e-8));
    assert_eq!(report["product_reciprocals"][0], true);
    assert!(report["solution"]["kkt"]["optimal"].as_bool().unwrap());
}

#[test]
fn four_state_uniform_detects_several() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("run.json");
    let out = udisc(&["run", "four-state", "--uniform", "--json", json.to_str().unwrap()]);
    assert!(out.status.success());
    let p = floats(&read_json(&json)["solution"]["p_star"]);
    assert!(p.iter().filter(|&&x| x > 1e-6).count() >= 2);
    assert!(read_json(&json)["locc"].is_null());
}

#[test]
fn example2_is_nlwe_for_all_priors() {
    let out = udisc(&["run", "example2", "--uniform"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("LOCC verdict at these priors: NLWE_AT_THESE_PRIORS"));
    assert!(text.contains("classification: NLWE_ALL_PRIORS"));
}

#[test]
fn validation_failures_exit_2() {
    for args in [
        vec!["run", "example7"],
        vec!["run", "example1", "--priors", "0.5,0.5"],
        vec!["run", "example1", "--priors", "0.1,0.1,0.1,0.1,0.1,0.1"],
        vec!["run", "four-state", "--priors-ab", "0.5", "0.5"],
        vec!["run", "example1", "--priors-ab", "1.0", "0.5"],
        vec!["scan", "--a-steps", "1", "--b-steps", "5", "--csv", "/dev/null"],
        vec!["mc", "four-state", "--target", "1", "--trials", "10"],
        vec!["mc", "example1", "--target", "0", "--trials", "10"],
    ] {
        let out = udisc(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).starts_with("error"), "{args:?}");
    }
}

#[test]
fn conflicting_prior_options_rejected() {
    let out = udisc(&["run", "example1", "--uniform", "--priors-ab", "0.5", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn step_cap_exits_3() {
    let out = udisc(&["run", "example1", "--max-steps", "2"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("did not converge"));
}

#[test]
fn tolerance_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("run.json");
    let out = udisc_env(
        &["run", "example1", "--json", json.to_str().unwrap()],
        &[("UDISC_TOL", "1e-3")],
    );
    assert!(out.status.success());
    assert_eq!(read_json(&json)["solution"]["kkt"]["tolerance"].as_f64(), Some(1e-3));
    let bad = udisc_env(&["run", "example1"], &[("UDISC_TOL", "tight")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn ensemble_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("pair.json");
    std::fs::write(
        &good,
        r#"{"dims":[2],"states":[[[1,0],[0,0]],[[0.6,0],[0.8,0]]],"priors":[0.5,0.5]}"#,
    )
    .unwrap();
    let out = udisc(&["run", good.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    // Equal priors: P_max = 1 − |<ψ1|ψ2>| = 0.4.
    assert!(stdout(&out).contains("P_max: 0.4000000"), "{}", stdout(&out));

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"dims":[2],"states":[[[1,0],[0,0]],[[0,0],[1,0]]],"priors":[0.5,0.4]}"#,
    )
    .unwrap();
    let out = udisc(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("priors"));
}

#[test]
fn scan_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let svg = dir.path().join("scan.svg");
    let args = [
        "scan",
        "--a-steps",
        "9",
        "--b-steps",
        "9",
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ];
    let out = udisc(&args);
    assert!(out.status.success());
    assert!(stdout(&out).contains("mismatches with analytic rule: 0"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "a,b,verdict");
    assert_eq!(lines.len(), 82);
    // Row-major with a outer: (0.9, 0.1) is row 73.
    assert_eq!(lines[73], "0.9,0.1,LOCC");
    assert_eq!(lines[1 + 9 + 4], "0.2,0.5,NLWE");
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let again = dir.path().join("again.csv");
    let out = udisc(&["scan", "--a-steps", "9", "--b-steps", "9", "--csv", again.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&csv).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn monte_carlo_matches_analytic_success() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("mc.json");
    let out = udisc(&[
        "mc", "example1", "--priors-ab", "0.9", "0.1", "--target", "1", "--trials", "1000000",
        "--seed", "17", "--json", json.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = read_json(&json);
    let xi1 = 9.0 * 0.9 / 143.0;
    assert!((report["analytic_success"].as_f64().unwrap() - xi1 * 4.0 / 9.0).abs() < 1e-12);
    assert!(report["z_score"].as_f64().unwrap().abs() <= 3.0);
    assert_eq!(report["outcome"]["errors"].as_u64(), Some(0));
    assert!(stdout(&out).contains("empirical_success"));
}

#[test]
fn monte_carlo_entangled_target_fails() {
    let out = udisc(&["mc", "example1", "--target", "2", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("reciprocal vector 2 is not a product vector"));
}

#[test]
fn monte_carlo_few_trials() {
    let out = udisc(&["mc", "example1", "--target", "1", "--trials", "10", "--seed", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("trials: 10"));
}
