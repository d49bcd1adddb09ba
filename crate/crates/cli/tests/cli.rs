use std::process::{Command, Output};

use serde_json::Value;

fn lgcy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgcy")).args(args).output().expect("binary runs")
}

fn json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("json on stdout")
}

#[test]
fn potential_below_first_exponent_is_empty() {
    let output = lgcy(&["potential", "--cutoff", "0.5"]);
    assert_eq!(output.status.code(), Some(0));
    let report = json(&output);
    assert_eq!(report["W"], Value::Array(vec![]));
}

#[test]
fn theta_passes() {
    let output = lgcy(&["theta", "--cutoff", "20"]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(json(&output)["pass"], Value::Bool(true));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["potential", "--cutoff", "0"][..],
        &["potential", "--cutoff", "-3"],
        &["potential", "--cutoff", "abc"],
        &["theta", "--output", "xml"],
        &["fukaya-count", "--target", "1,2"],
        &["fukaya-count", "--target", "0,0,0"],
        &["no-such-command"],
    ] {
        assert_eq!(lgcy(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn diagram_passes_at_a_nonzero_index() {
    let output = lgcy(&["diagram", "--index", "-2", "--cutoff", "40"]);
    assert_eq!(output.status.code(), Some(0));
    let report = json(&output);
    assert_eq!(report["index"], Value::from(-2));
    assert_eq!(report["pass"], Value::Bool(true));
}

#[test]
fn target_strip_counts_factorize_w() {
    let output = lgcy(&["fukaya-count", "--target", "1,0,0", "--index", "1", "--cutoff", "20"]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(json(&output)["pass"], Value::Bool(true));
}

#[test]
fn text_output() {
    let output = lgcy(&["mf-check", "--cutoff", "20", "--output", "text"]);
    assert_eq!(output.status.code(), Some(0));
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.starts_with("M0: composites true"), "{text}");
}
