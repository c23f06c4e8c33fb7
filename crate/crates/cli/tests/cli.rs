//! End-to-end tests against the compiled binary: exit codes, pipelines,
//! envelope shape, and byte determinism.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_planorder");

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child.stdin.as_mut().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().expect("no signal"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn pipeline_generate_deorder_schedule() {
    let (code, doc, _) = run(&["gen", "toycar"], "");
    assert_eq!(code, 0);
    let (code, deordered, _) = run(&["deorder", "-", "--algo", "prf"], &doc);
    assert_eq!(code, 0);
    let (code, out, _) = run(&["schedule", "-"], &deordered);
    assert_eq!(code, 0);
    assert_eq!(out, "makespan=25\n");
}

#[test]
fn validate_rejects_a_goal_nobody_produces() {
    let doc = r#"{
      "format_version": 1,
      "atoms": ["g", "p"],
      "actions": [
        {"id": "a", "pre": [], "post": ["p"], "duration": 1}
      ],
      "init": [],
      "goal": ["g"],
      "order": [],
      "nonconc": [],
      "meta": {}
    }"#;
    let (code, out, _) = run(&["validate", "-"], doc);
    assert_eq!(code, 1);
    assert_eq!(out, "invalid\n");
    let (code, out, _) = run(&["validate", "-", "--brute"], doc);
    assert_eq!(code, 1);
    assert_eq!(out, "invalid\n");
}

#[test]
fn reordering_count_blows_the_default_budget_at_six_actions() {
    // 4231 partial orders on five elements fit under the default node cap;
    // the six-element count does not.
    let (code, out, _) = run(&["exact", &fixture("gap-1-2.json"), "--problem", "mmcr"], "");
    assert_eq!(code, 3, "six actions must exhaust the default budget: {out}");
    assert!(out.starts_with("error:"), "budget failure is reported on stdout: {out}");
    let (code, out, _) =
        run(&["exact", &fixture("coloring-c5.json"), "--problem", "mmcr"], "");
    assert_eq!(code, 0, "five actions fit the default budget: {out}");
    assert!(out.starts_with("optimum="), "{out}");
}

#[test]
fn malformed_input_is_a_usage_error_not_a_crash() {
    let (code, out, _) = run(&["validate", "-"], "{\"format_version\": 1,");
    assert_eq!(code, 2);
    assert!(out.starts_with("error:"), "{out}");
    let (code, out, _) = run(&["schedule", "-"], "not json at all");
    assert_eq!(code, 2);
    assert!(out.contains("line"), "parse errors locate themselves: {out}");
    // Semantic rejection: order names an unknown action.
    let doc = r#"{
      "format_version": 1,
      "atoms": ["p"],
      "actions": [{"id": "a", "pre": [], "post": ["p"], "duration": 1}],
      "init": [],
      "goal": [],
      "order": [["a", "ghost"]],
      "nonconc": [],
      "meta": {}
    }"#;
    let (code, out, _) = run(&["validate", "-"], doc);
    assert_eq!(code, 2);
    assert!(out.contains("ghost"), "semantic errors name the offender: {out}");
}

#[test]
fn usage_errors_from_flag_parsing() {
    let (code, _, _) = run(&["frobnicate"], "");
    assert_eq!(code, 2);
    let (code, _, _) = run(&["exact", &fixture("toycar.json"), "--problem", "nope"], "");
    assert_eq!(code, 2);
}

#[test]
fn generator_budget_is_exit_three() {
    let (code, out, _) = run(&["gen", "gap", "--levels", "5", "--fanout", "4"], "");
    assert_eq!(code, 3);
    assert!(out.starts_with("error:"), "{out}");
}

#[test]
fn identical_invocations_are_byte_identical() {
    let (c1, a, _) = run(&["gen", "toycar"], "");
    let (c2, b, _) = run(&["gen", "toycar"], "");
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let args = ["exact", &fixture("toycar.json"), "--problem", "mmpd", "--json"];
    let (c1, a, _) = run(&args, "");
    let (c2, b, _) = run(&args, "");
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn json_envelope_has_the_documented_shape() {
    let (code, out, _) =
        run(&["--json", "exact", &fixture("toycar.json"), "--problem", "mmpd"], "");
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "exact");
    assert_eq!(v["answer"], 25);
    assert!(v["witness"]["order"].is_array());
    assert!(v["stats"]["actions"].is_number());
    // Global flag also accepted after the subcommand.
    let (code, out2, _) =
        run(&["exact", &fixture("toycar.json"), "--problem", "mmpd", "--json"], "");
    assert_eq!(code, 0);
    assert_eq!(out, out2);
}

#[test]
fn bound_decisions_use_exit_one_for_no() {
    let toycar = fixture("toycar.json");
    let (code, out, _) =
        run(&["exact", &toycar, "--problem", "mmpr", "--bound", "15"], "");
    assert_eq!(code, 1);
    assert_eq!(out, "false\n");
    let (code, out, _) =
        run(&["exact", &toycar, "--problem", "mmpr", "--bound", "16"], "");
    assert_eq!(code, 0);
    assert_eq!(out, "true\n");
}

#[test]
fn schedule_refuses_indefinite_plans() {
    // Two clashing writers with no order between them: no deterministic
    // schedule exists, which is a usage error rather than a negative answer.
    let doc = r#"{
      "format_version": 1,
      "atoms": ["p"],
      "actions": [
        {"id": "a", "pre": [], "post": ["p"], "duration": 1},
        {"id": "b", "pre": [], "post": ["!p"], "duration": 1}
      ],
      "init": [],
      "goal": [],
      "order": [],
      "nonconc": [["a", "b"]],
      "meta": {}
    }"#;
    let (code, out, _) = run(&["schedule", "-"], doc);
    assert_eq!(code, 2);
    assert!(out.starts_with("error:"), "{out}");
}

#[test]
fn every_generator_family_emits_a_plan_the_validator_accepts() {
    let invocations: Vec<Vec<&str>> = vec![
        vec!["gen", "cover", "--ground", "x,y,z", "--subset", "x,y", "--subset", "z"],
        vec!["gen", "coloring", "--graph", "petersen"],
        vec!["gen", "coloring", "--graph", "cycle:5", "--totalize"],
        vec!["gen", "3sat", "--atoms", "2", "--clause", "1,-2,1", "--allow-repeats"],
        vec!["gen", "3sat", "--atoms", "3", "--clause", "1,2,3", "--clause", "-1,-2,-3", "--strict-text"],
        vec!["gen", "gap", "--levels", "2", "--fanout", "2"],
        vec!["gen", "toycar", "--duration", "PAC=2", "--duration", "MvT1=8"],
    ];
    for argv in invocations {
        let (code, doc, _) = run(&argv, "");
        assert_eq!(code, 0, "{argv:?}");
        let (code, out, _) = run(&["validate", "-"], &doc);
        assert_eq!(code, 0, "{argv:?} must emit a valid plan: {out}");
        assert_eq!(out, "valid\n");
    }
}

#[test]
fn render_draws_the_schedule_and_rejects_bad_executions() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let plan_path = dir.join("render-plan.json");
    let exec_path = dir.join("render-exec.json");
    let doc = r#"{
      "format_version": 1,
      "atoms": ["p", "q"],
      "actions": [
        {"id": "a", "pre": [], "post": ["p"], "duration": 2},
        {"id": "b", "pre": ["p"], "post": ["q"], "duration": 1}
      ],
      "init": [],
      "goal": ["q"],
      "order": [["a", "b"]],
      "nonconc": [],
      "meta": {}
    }"#;
    std::fs::write(&plan_path, doc).unwrap();
    std::fs::write(&exec_path, "{\"format_version\": 1, \"release\": {\"a\": 0, \"b\": 2}}")
        .unwrap();
    let (code, out, _) = run(
        &["render", plan_path.to_str().unwrap(), "--exec", exec_path.to_str().unwrap()],
        "",
    );
    assert_eq!(code, 0);
    assert_eq!(out, "a ##.\nb ..#\nmakespan=3\n");
    // Starting b before a finishes violates the order.
    std::fs::write(&exec_path, "{\"format_version\": 1, \"release\": {\"a\": 0, \"b\": 1}}")
        .unwrap();
    let (code, out, _) = run(
        &["render", plan_path.to_str().unwrap(), "--exec", exec_path.to_str().unwrap()],
        "",
    );
    assert_eq!(code, 1);
    assert!(out.starts_with("invalid execution:"), "{out}");
}

#[test]
fn reference_algorithm_output_flows_back_through_the_validator() {
    for (file, algo) in [
        ("refalg-vpc-favorable.json", "vpc"),
        ("refalg-vpc-unfavorable.json", "vpc"),
        ("refalg-kk-redundant.json", "kk"),
    ] {
        let (code, doc, _) = run(&["refalg", &fixture(file), "--algo", algo], "");
        assert_eq!(code, 0, "{file}");
        let (code, out, _) = run(&["validate", "-"], &doc);
        assert_eq!(code, 0, "{file} output must validate: {out}");
    }
}

#[test]
fn deorder_shrinks_the_blown_up_sorting() {
    // mld on the vpc-unfavorable sequencing drops it to the two necessary
    // constraints; check the emitted order on the wire.
    let (code, doc, _) =
        run(&["deorder", &fixture("refalg-vpc-unfavorable.json"), "--algo", "mld"], "");
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
    let order = v["order"].as_array().unwrap();
    assert_eq!(order.len(), 2, "{order:?}");
}

#[test]
fn json_error_envelope_still_names_the_command() {
    let (code, out, _) = run(&["--json", "gen", "gap", "--levels", "5", "--fanout", "4"], "");
    assert_eq!(code, 3);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["command"], "gen");
    assert!(v["error"].is_string());
}
