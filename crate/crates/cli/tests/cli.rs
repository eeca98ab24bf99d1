use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabmagic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn measure_value(v: &Value, name: &str) -> f64 {
    v["results"]["measures"]
        .as_array()
        .unwrap()
        .iter()
        .find(|m| m["measure"] == name)
        .unwrap_or_else(|| panic!("no {name} in {v}"))["value"]
        .as_f64()
        .unwrap()
}

fn circuit_file(lines: &[&str]) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    for l in lines {
        writeln!(f, "{l}").unwrap();
    }
    f
}

#[test]
fn w_state_sre() {
    let v = json(&["measure", "--state", "w:4", "--sre", "2"]);
    let want = 3.0 * 4f64.ln() - 22f64.ln();
    assert!((measure_value(&v, "sre") - want).abs() < 1e-9);
}

#[test]
fn chi_dmin_in_both_bases() {
    let want = -((1.0 + 1.0 / 3f64.sqrt()) / 2.0).ln();
    let nats = json(&["measure", "--state", "chi", "--dmin"]);
    assert!((measure_value(&nats, "dmin") - want).abs() < 1e-10);
    let bits = json(&["measure", "--state", "chi", "--dmin", "--log-base", "2"]);
    assert!((measure_value(&bits, "dmin") - want / std::f64::consts::LN_2).abs() < 1e-10);
    assert_eq!(bits["log_base"], "2");
}

#[test]
fn random_stabilizer_state_is_free() {
    let v = json(&[
        "measure",
        "--state",
        "stab-random:3",
        "--seed",
        "7",
        "--bmsa-exact",
        "1",
    ]);
    assert!(measure_value(&v, "bmsa_exact").abs() < 1e-9);
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let args = [
        "measure", "--state", "haar:3", "--seed", "5", "--bmsa", "--method", "anneal", "--sre", "2",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["measure", "--state", "haar:3", "--seed", "6", "--sre", "2"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        vec!["measure", "--state", "w:12", "--bmsa-exact", "1", "--method", "bb"],
        vec!["measure", "--state", "nonsense:3"],
        vec![
            "measure", "--state", "haar:2", "--bmsa", "--alpha", "1.5", "--method", "bb",
        ],
        vec!["measure", "--state", "chi", "--log-base", "10"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn inequality_battery_passes_and_reports_both_units() {
    let out = run(&["check-inequalities", "--out", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .contains("worst_slack_nats,worst_slack_bits"));
    let v = json(&["check-inequalities", "--trials", "10"]);
    assert_eq!(v["results"]["total_violations"], 0);
}

#[test]
fn injected_fault_exits_3() {
    let out = run(&["check-inequalities", "--trials", "5", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn clifford_only_circuit_keeps_one_term() {
    let f = circuit_file(&[
        r#"{"g":"H","q":[0]}"#,
        r#"{"g":"CNOT","q":[0,1]}"#,
        r#"{"g":"S","q":[2]}"#,
    ]);
    let v = json(&["sim", "--circuit", f.path().to_str().unwrap(), "--n", "3"]);
    assert!(v["results"]["term_counts"].as_array().unwrap().iter().all(|c| c == 1));
}

#[test]
fn four_rotation_circuit_matches_dense() {
    let f = circuit_file(&[
        r#"{"g":"H","q":[0]}"#,
        r#"{"g":"ROT","p":"XZIIY","theta":0.3}"#,
        r#"{"g":"CNOT","q":[0,3]}"#,
        r#"{"g":"T","q":[1]}"#,
        r#"{"g":"ROT","p":"ZZZII","theta":-0.7}"#,
        r#"{"g":"H","q":[4]}"#,
        r#"{"g":"TDG","q":[4]}"#,
    ]);
    let v = json(&["sim", "--circuit", f.path().to_str().unwrap(), "--n", "5", "--eps", "0"]);
    assert!(v["results"]["fidelity"].as_f64().unwrap() >= 1.0 - 1e-10);
    assert_eq!(v["results"]["rotations"], 4);
}

#[test]
fn truncation_reports_discarded_weight() {
    let f = circuit_file(&[
        r#"{"g":"ROT","p":"XII","theta":1e-4}"#,
        r#"{"g":"ROT","p":"IYI","theta":0.5}"#,
    ]);
    let v = json(&[
        "sim",
        "--circuit",
        f.path().to_str().unwrap(),
        "--n",
        "3",
        "--eps",
        "1e-3",
    ]);
    assert!(v["results"]["discarded_weight"].as_f64().unwrap() > 0.0);
}

#[test]
fn circuit_parse_errors_carry_line_numbers() {
    let f = circuit_file(&[r#"{"g":"H","q":[0]}"#, r#"{"g":"FOO","q":[0]}"#]);
    let out = run(&["sim", "--circuit", f.path().to_str().unwrap(), "--n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn product_scan_is_linear() {
    let v = json(&["scan-product", "--theta", "pi/8", "--n-min", "2", "--n-max", "5"]);
    let rows = v["results"]["rows"].as_array().unwrap();
    let vals: Vec<f64> = rows.iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] > w[0]));
    assert!(v["results"]["fit"]["r2"].as_f64().unwrap() > 0.99);
}

#[test]
fn ising_scan_peaks_near_critical_field_and_anneal_agrees() {
    let v = json(&["scan-ising", "--n", "6", "--compare"]);
    assert!((v["results"]["peak_h"].as_f64().unwrap() - 1.0).abs() <= 0.1 + 1e-9);
    assert!(v["results"]["max_abs_diff_nats"].as_f64().unwrap() <= 1e-6);
    let out = run(&["scan-ising", "--n", "4", "--out", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# stabmagic scan-ising v1"));
    assert_eq!(text.lines().count(), 2 + 7);
}
