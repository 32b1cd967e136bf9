//! End-to-end tests of the binary: exit codes, witness payloads, the
//! piping contract between subcommands, and byte-level determinism.

use std::io::Write as _;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hecke-lattices"))
}

fn run_with_input(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .expect("stdin is piped")
        .write_all(input.as_bytes())
        .expect("input written");
    child.wait_with_output().expect("binary exits")
}

fn run_args(args: &[&str]) -> Output {
    bin()
        .args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns")
        .wait_with_output()
        .expect("binary exits")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stdout_text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn temp_path(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("hecke-lattices-cli-test-{name}-{}", std::process::id()))
}

#[test]
fn balanced_weight_reports_true_with_exit_zero() {
    let out = run_with_input(&["weights", "check"], r#"{"d":2,"r":1,"n":[-1,0,1]}"#);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out), serde_json::json!({ "balanced": true }));
}

#[test]
fn unbalanced_weight_reports_witness_with_exit_one() {
    let out = run_with_input(&["weights", "check"], r#"{"d":1,"r":1,"n":[1,-1]}"#);
    assert_eq!(code(&out), 1);
    let json = stdout_json(&out);
    assert_eq!(json["balanced"], Value::Bool(false));
    assert_eq!(json["witness"]["Subset"]["subset"], serde_json::json!([0]));
}

#[test]
fn malformed_input_exits_two() {
    let out = run_with_input(&["weights", "check"], "not json at all");
    assert_eq!(code(&out), 2);
    let err: Value = serde_json::from_slice(&out.stderr).expect("error JSON on stderr");
    assert!(err["error"].as_str().expect("message").contains("invalid JSON"));
}

#[test]
fn unknown_subcommand_exits_two() {
    let out = run_args(&["frobnicate"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn flag_conflicting_with_input_exits_two() {
    let out = run_with_input(&["weights", "check", "--d", "3"], r#"{"d":2,"r":1,"n":[-1,0,1]}"#);
    assert_eq!(code(&out), 2);
    let err: Value = serde_json::from_slice(&out.stderr).expect("error JSON on stderr");
    assert!(err["error"].as_str().expect("message").contains("conflicts"));
}

#[test]
fn config_invariants_are_enforced() {
    for args in [
        ["weights", "enumerate", "--d", "2", "--r", "0"],
        ["weights", "enumerate", "--d", "2", "--q", "6"],
        ["weights", "enumerate", "--d", "2", "--q", "67"],
        ["weights", "enumerate", "--d", "0", "--r", "1"],
    ] {
        let out = run_args(&args);
        assert_eq!(code(&out), 2, "args {args:?}");
    }
    let out = run_with_input(
        &["oracle", "compare", "--precision", "2"],
        r#"{"d":1,"q":2,"r":1,"theta_exp":[0,0],"pi_ord":[0,0],"unit_exp":[0,0]}"#,
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn enumeration_pipes_through_build_check_and_reduce() {
    let listed = run_args(&["weights", "enumerate", "--d", "2", "--r", "1"]);
    assert_eq!(code(&listed), 0);
    assert_eq!(stdout_json(&listed)["count"], serde_json::json!(7));

    let built = run_with_input(&["nabla", "build"], &stdout_text(&listed));
    assert_eq!(code(&built), 0);
    assert_eq!(stdout_json(&built)["count"], serde_json::json!(7));

    let checked = run_with_input(&["lattice", "check", "--q", "3"], &stdout_text(&built));
    assert_eq!(code(&checked), 0, "{}", String::from_utf8_lossy(&checked.stderr));
    let json = stdout_json(&checked);
    assert_eq!(json["all_stable"], Value::Bool(true));
    assert_eq!(json["stable_count"], serde_json::json!(7));

    let verified = run_with_input(&["nabla", "check"], &stdout_text(&built));
    assert_eq!(code(&verified), 0);
    assert_eq!(stdout_json(&verified)["all_integrate"], Value::Bool(true));

    let reduced = run_with_input(&["module", "reduce", "--q", "3"], &stdout_text(&built));
    assert_eq!(code(&reduced), 0);
    assert_eq!(stdout_json(&reduced)["all_reduced"], Value::Bool(true));
}

#[test]
fn single_item_pipeline_emits_a_certificate() {
    let built = run_with_input(&["nabla", "build"], r#"{"d":2,"r":1,"n":[-1,0,1]}"#);
    assert_eq!(code(&built), 0);
    let item = stdout_json(&built);
    assert!(item["nabla"]["entries"].is_object());

    let checked = run_with_input(&["lattice", "check", "--q", "3"], &stdout_text(&built));
    assert_eq!(code(&checked), 0);
    let json = stdout_json(&checked);
    assert_eq!(json["stable"], Value::Bool(true));
    assert_eq!(json["routes"]["operator"], Value::Bool(true));
    assert_eq!(json["routes"]["rotation_window"], Value::Bool(true));
    assert_eq!(json["character"]["pi_ord"], serde_json::json!([-1, 1, 0]));
}

#[test]
fn broken_function_is_rejected_everywhere_with_witnesses() {
    let item = r#"{"weight":{"d":1,"r":1,"n":[-1,1]},"nabla":{"d":1,"entries":{"0 1":0,"1 0":5}}}"#;

    let checked = run_with_input(&["lattice", "check", "--q", "3"], item);
    assert_eq!(code(&checked), 1);
    let json = stdout_json(&checked);
    assert_eq!(json["stable"], Value::Bool(false));
    assert!(json["witness"]["generator"].is_string());

    let reduced = run_with_input(&["module", "reduce", "--q", "3"], item);
    assert_eq!(code(&reduced), 1);
    assert_eq!(stdout_json(&reduced)["reduced"], Value::Bool(false));

    let verified = run_with_input(&["nabla", "check"], item);
    assert_eq!(code(&verified), 1);
    assert_eq!(stdout_json(&verified)["integrates"], Value::Bool(false));
}

#[test]
fn reduce_emits_the_lower_degree_weight() {
    let out = run_with_input(&["weights", "reduce"], r#"{"d":2,"r":1,"n":[-1,0,1]}"#);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out), serde_json::json!({ "d": 1, "n": [-1, 1], "r": 1 }));
}

#[test]
fn identical_invocations_emit_identical_bytes() {
    let first = run_args(&["weights", "enumerate", "--d", "3", "--r", "2"]);
    let second = run_args(&["weights", "enumerate", "--d", "3", "--r", "2"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn input_and_output_files_round_trip() {
    let in_path = temp_path("weight-in");
    let out_path = temp_path("item-out");
    std::fs::write(&in_path, r#"{"d":2,"r":1,"n":[-1,0,1]}"#).expect("write input");
    let built = run_args(&[
        "nabla",
        "build",
        "--in",
        in_path.to_str().expect("utf-8 path"),
        "--out",
        out_path.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(code(&built), 0);
    assert!(built.stdout.is_empty(), "output went to the file");
    let text = std::fs::read_to_string(&out_path).expect("read output");
    let item: Value = serde_json::from_str(&text).expect("file holds JSON");
    assert_eq!(item["weight"]["n"], serde_json::json!([-1, 0, 1]));
    let _ = std::fs::remove_file(&in_path);
    let _ = std::fs::remove_file(&out_path);
}

#[test]
fn criterion_check_agrees_with_its_dual_and_duality_is_an_involution() {
    let character = r#"{"d":2,"q":3,"r":1,"theta_exp":[0,0,0],"pi_ord":[-1,1,0],"unit_exp":[0,0,0]}"#;
    let verdict = run_with_input(&["criterion", "check"], character);
    assert_eq!(code(&verdict), 0);

    let dual = run_with_input(&["criterion", "dual"], character);
    assert_eq!(code(&dual), 0);
    let dual_verdict = run_with_input(&["criterion", "check"], &stdout_text(&dual));
    assert_eq!(code(&dual_verdict), 0);

    let double = run_with_input(&["criterion", "dual"], &stdout_text(&dual));
    let original: Value = serde_json::from_str(character).expect("valid character");
    assert_eq!(stdout_json(&double), original);

    let violating =
        r#"{"d":2,"q":3,"r":1,"theta_exp":[0,0,0],"pi_ord":[-3,3,0],"unit_exp":[0,0,0]}"#;
    let rejected = run_with_input(&["criterion", "check"], violating);
    assert_eq!(code(&rejected), 1);
    assert!(stdout_json(&rejected)["witness"]["Subset"].is_object());
}

#[test]
fn make_then_validate_round_trips() {
    let made = run_with_input(
        &["module", "make"],
        r#"{"q":3,"theta_exp":[0,1,0],"sigma":{"0 1 2":0,"1 0 2":1,"2 0 1":-1}}"#,
    );
    assert_eq!(code(&made), 0, "{}", String::from_utf8_lossy(&made.stderr));
    let validated = run_with_input(&["module", "validate"], &stdout_text(&made));
    assert_eq!(code(&validated), 0);
    let json = stdout_json(&validated);
    assert_eq!(json["valid"], Value::Bool(true));
    assert_eq!(json["failed_relations"], serde_json::json!([]));
}

#[test]
fn tampered_module_fails_validation() {
    let made = run_with_input(
        &["module", "make"],
        r#"{"q":3,"theta_exp":[0,1,0],"sigma":{"0 1 2":0,"1 0 2":1,"2 0 1":-1}}"#,
    );
    assert_eq!(code(&made), 0);
    let mut module = stdout_json(&made);
    // Corrupt one rotation entry.
    module["u"][0][2] = serde_json::json!(2);
    let validated = run_with_input(&["module", "validate"], &module.to_string());
    assert_eq!(code(&validated), 1);
    let json = stdout_json(&validated);
    assert_eq!(json["valid"], Value::Bool(false));
    assert!(json["mismatched_matrices"]
        .as_array()
        .expect("list")
        .contains(&serde_json::json!("u")));
}

#[test]
fn partial_search_feeds_realization() {
    let sigma = r#"{"d":2,"r":2,"sigma":{"0 1 2":1,"1 0 2":-1,"2 0 1":0}}"#;
    let found = run_with_input(&["partial", "search"], sigma);
    assert_eq!(code(&found), 0);
    let partial = stdout_json(&found)["partial"].clone();

    let request = serde_json::json!({
        "q": 5,
        "theta_exp": [0, 1, 2],
        "sigma": { "0 1 2": 1, "1 0 2": -1, "2 0 1": 0 },
        "partial": partial,
    });
    let realized = run_with_input(&["realize"], &request.to_string());
    assert_eq!(code(&realized), 0, "{}", String::from_utf8_lossy(&realized.stderr));
    let json = stdout_json(&realized);
    assert_eq!(json["character"]["q"], serde_json::json!(5));
    assert!(json["nabla"]["entries"].is_object());
}

#[test]
fn realize_searches_when_no_increments_are_given() {
    let out = run_with_input(
        &["realize"],
        r#"{"q":5,"r":2,"theta_exp":[0,0,0],"sigma":{"0 1 2":1,"1 0 2":1,"2 0 1":1}}"#,
    );
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["character"]["pi_ord"], serde_json::json!([0, 0, 0]));
}

#[test]
fn realize_reports_broken_hypotheses_with_exit_one() {
    // Unit parts differ inside a w(0)-class.
    let out = run_with_input(
        &["realize"],
        r#"{"q":5,"r":2,"theta_exp":[0,0,0],"sigma":{"0 1 2":1,"1 0 2":1,"2 0 1":1},"eps":{"0 1 2":1,"0 2 1":2,"1 0 2":1,"1 2 0":1,"2 0 1":1,"2 1 0":1}}"#,
    );
    assert_eq!(code(&out), 1);
    let json = stdout_json(&out);
    assert_eq!(json["realized"], Value::Bool(false));
    assert!(json["witness"].as_str().expect("reason").contains("classes"));
}

#[test]
fn oracle_compare_matches_at_two_cutoffs() {
    let character =
        r#"{"d":1,"q":3,"r":2,"theta_exp":[0,1],"pi_ord":[1,-1],"unit_exp":[1,0]}"#;
    let base = run_with_input(&["oracle", "compare"], character);
    assert_eq!(code(&base), 0, "{}", String::from_utf8_lossy(&base.stderr));
    let base_json = stdout_json(&base);
    assert_eq!(base_json["mismatches"], serde_json::json!([]));
    assert_eq!(base_json["precision"], serde_json::json!(8));

    let fine = run_with_input(&["oracle", "compare", "--precision", "16"], character);
    assert_eq!(code(&fine), 0);
    assert_eq!(stdout_json(&fine)["matches"], base_json["matches"]);
}

#[test]
fn suite_reports_every_criterion_without_timings() {
    let out = run_args(&["suite"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = stdout_json(&out);
    assert_eq!(json["passed"], Value::Bool(true));
    let criteria = json["criteria"].as_array().expect("criteria list");
    assert_eq!(criteria.len(), 10);
    for c in criteria {
        assert_eq!(c["passed"], Value::Bool(true), "{c}");
        assert!(c.get("millis").is_none(), "timings stay off the machine path");
    }
    // Byte determinism for the battery output as well.
    let again = run_args(&["suite"]);
    assert_eq!(out.stdout, again.stdout);
}
