//! End-to-end runs of the `tcech` binary: subcommand wiring, file formats,
//! and the exit-status contract (0 pass, 1 input/validation failure,
//! 2 internal verification failure).

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tcech"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("tcech-cli-{name}"))
}

#[test]
fn check_valid_example_exits_zero() {
    let out = run(&["check", "example:o_d_cpn(2,1)"]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("cocycle condition"));
}

#[test]
fn check_reports_malformed_expression() {
    let path = tmp("bad-expr.json");
    std::fs::write(
        &path,
        r#"{"field":"Q","rank":1,
           "charts":[{"index":0,"vars":["z"]},{"index":1,"vars":["w"]}],
           "changes":[{"from":0,"to":1,"map":{"w":"1/z"}},{"from":1,"to":0,"map":{"z":"1/w"}}],
           "transitions":[{"pair":[0,1],"matrix":[["z^$"]]}]}"#,
    )
    .unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("syntax error"), "stderr: {err}");
}

#[test]
fn check_rejects_singular_transition() {
    let path = tmp("singular.json");
    std::fs::write(
        &path,
        r#"{"field":"Q","rank":2,
           "charts":[{"index":0,"vars":["z"]},{"index":1,"vars":["w"]}],
           "changes":[{"from":0,"to":1,"map":{"w":"1/z"}},{"from":1,"to":0,"map":{"z":"1/w"}}],
           "transitions":[{"pair":[0,1],"matrix":[["z","z"],["1","1"]]}]}"#,
    )
    .unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular"));
}

#[test]
fn check_flags_tampered_cocycle() {
    // O(1) on the projective plane with g_02 scaled by (1 + x1): the triple
    // (0,1,2) must be named, with exit status 1.
    let good = tmp("good-cp2.json");
    let out = run(&["examples", "o_d_cpn(2,1)", "--out", good.to_str().unwrap()]);
    assert!(out.status.success());
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&good).unwrap()).unwrap();
    let transitions = doc["transitions"].as_array_mut().unwrap();
    let g02 = transitions
        .iter_mut()
        .find(|t| t["pair"] == serde_json::json!([0, 2]))
        .unwrap();
    g02["matrix"][0][0] = serde_json::Value::String("x2*(1 + x1)".into());
    let bad = tmp("bad-cp2.json");
    std::fs::write(&bad, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("[0, 1, 2]"), "{}", stdout(&out));
}

#[test]
fn invariant_writes_cochain_file() {
    let out_path = tmp("f1-o3.json");
    let out = run(&[
        "invariant",
        "example:o_d_cp1(3)",
        "-k",
        "1",
        "--fast-path-crosscheck",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.contains("\"degree\": 1"));
    assert!(text.contains("3/z") || text.contains("(3)/(z)"), "{text}");
}

#[test]
fn refined_higher_requires_flag() {
    // A non-triangular presentation cannot carry the refined k=2 invariant.
    let path = tmp("nonflag.json");
    std::fs::write(
        &path,
        r#"{"field":"Q","rank":2,
           "charts":[{"index":0,"vars":["z"]},{"index":1,"vars":["w"]}],
           "changes":[{"from":0,"to":1,"map":{"w":"1/z"}},{"from":1,"to":0,"map":{"z":"1/w"}}],
           "transitions":[{"pair":[0,1],"matrix":[["z","1"],["1","z"]]}],
           "flag":false}"#,
    )
    .unwrap();
    let out = run(&["invariant", path.to_str().unwrap(), "-k", "2", "--refined"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("flag"));
}

#[test]
fn witness_with_gauge_file() {
    let bundle = tmp("witness-bundle.json");
    let out = run(&["examples", "o_d_cp1(2)", "--out", bundle.to_str().unwrap()]);
    assert!(out.status.success());
    let gauge = tmp("witness-gauge.json");
    std::fs::write(&gauge, r#"{"gauge":[{"index":0,"matrix":[["z^2 + 1"]]}]}"#).unwrap();
    let witness_out = tmp("witness-s.json");
    let out = run(&[
        "witness",
        bundle.to_str().unwrap(),
        gauge.to_str().unwrap(),
        "-k",
        "1",
        "--out",
        witness_out.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(stdout(&out).contains("witness verified"));
    let text = std::fs::read_to_string(&witness_out).unwrap();
    assert!(text.contains("2*z"), "{text}");
}

#[test]
fn cup_of_serialized_cochains() {
    let f1 = tmp("cup-f1.json");
    let out = run(&[
        "invariant",
        "example:o_d_cpn(2,1)",
        "-k",
        "1",
        "--out",
        f1.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let f2 = tmp("cup-f2.json");
    let out = run(&[
        "invariant",
        "example:o_d_cpn(2,1)",
        "-k",
        "2",
        "--out",
        f2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let product = tmp("cup-f1f1.json");
    let out = run(&[
        "cup",
        f1.to_str().unwrap(),
        f1.to_str().unwrap(),
        "--out",
        product.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    // The cup square equals the degree-2 invariant on this bundle.
    let cup_text: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&product).unwrap()).unwrap();
    let f2_text: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&f2).unwrap()).unwrap();
    assert_eq!(cup_text["components"], f2_text["components"]);
}

#[test]
fn degree_command() {
    let out = run(&["degree", "example:o_d_cp1(5)"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("degree: 5"));
    let out = run(&["degree", "example:direct_sum(2,3)"]);
    assert!(stdout(&out).contains("degree: 5"));
    let out = run(&["degree", "example:o_d_cp1(0)"]);
    assert!(stdout(&out).contains("degree: 0"));
    // Wrong cover: the projective plane has no residue pairing here.
    let out = run(&["degree", "example:o_d_cpn(2,1)"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn suite_is_deterministic_and_field_aware() {
    let args = [
        "suite",
        "--max-k",
        "1",
        "--max-rank",
        "2",
        "--seed",
        "11",
        "--cocycle-instances",
        "2",
        "--witness-instances",
        "1",
        "--kernel-checks",
        "2",
        "--out-dir",
    ];
    let dir = std::env::temp_dir();
    let a = run(&[&args[..], &[dir.to_str().unwrap()]].concat());
    let b = run(&[&args[..], &[dir.to_str().unwrap()]].concat());
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b), "fixed seed reruns byte-identical");

    let out = bin()
        .args(["--field", "prime:2"])
        .args(["suite", "--max-k", "1", "--max-rank", "1"])
        .args([
            "--cocycle-instances",
            "1",
            "--witness-instances",
            "1",
            "--kernel-checks",
            "1",
        ])
        .args(["--out-dir", dir.to_str().unwrap()])
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("skipped: characteristic 2"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn json_report_mode() {
    let out = run(&["--json", "degree", "example:o_d_cp1(4)"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["checks"][0]["detail"], "4");
}

#[test]
fn chern_and_experiments() {
    let out = run(&["chern", "example:o_d_cp1(3)", "--max-k", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("degree 0: constant 1"), "{text}");
    let out = run(&[
        "chern",
        "example:direct_sum(1,2)",
        "--max-k",
        "0",
        "--rank-degree-zero",
    ]);
    assert!(stdout(&out).contains("constant 2"));

    let out = run(&["experiment", "whitney", "--d1", "1", "--d2", "2"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let out = run(&["experiment", "flag-dependence", "--a", "1", "--b", "2"]);
    assert!(out.status.success());
}
