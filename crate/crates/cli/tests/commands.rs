use std::path::{Path, PathBuf};
use std::process::Command;

use ballschur_cli::{
    cmd_check, cmd_eval, cmd_selftest, cmd_solve, cmd_verify, render, RunConfig, EXIT_INFEASIBLE,
    EXIT_INPUT, EXIT_OK, EXIT_VERIFY,
};
use serde_json::{json, Value};
use tempfile::TempDir;

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path
}

fn write_text(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn scalar_problem(conditions: &[(f64, f64)]) -> Value {
    let conditions: Vec<Value> = conditions
        .iter()
        .map(|&(nu, eta)| json!({"nu": [[nu, 0.0]], "xi": [[1.0, 0.0]], "eta": [[eta, 0.0]]}))
        .collect();
    json!({"N": 1, "p": 1, "q": 1, "conditions": conditions})
}

fn z_squared_problem() -> Value {
    scalar_problem(&[(0.0, 0.0), (0.5, 0.25)])
}

fn solve_to_file(dir: &TempDir, problem: &Path) -> PathBuf {
    let outcome = cmd_solve(problem, &RunConfig::default());
    assert_eq!(outcome.code, EXIT_OK, "{}", render(&outcome.report));
    write(dir, "solution.json", &outcome.report)
}

#[test]
fn check_reports_solvable_single_condition() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.json", &scalar_problem(&[(0.0, 0.5)]));
    let outcome = cmd_check(&path);
    assert_eq!(outcome.code, EXIT_OK);
    let min = outcome.report["pick"]["min_eigenvalue"].as_f64().unwrap();
    assert!((min - 0.75).abs() < 1e-15);
    assert_eq!(outcome.report["margins"][0].as_f64().unwrap(), 0.75);
}

#[test]
fn check_flags_infeasible_and_malformed_input() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", &scalar_problem(&[(0.2, 1.5)]));
    assert_eq!(cmd_check(&bad).code, EXIT_INFEASIBLE);
    let truncated = write_text(&dir, "t.json", r#"{"N": 1, "p": 1, "q": 1, "conditions": [{"nu": [[0"#);
    let outcome = cmd_check(&truncated);
    assert_eq!(outcome.code, EXIT_INPUT);
    assert_eq!(outcome.report["error"]["kind"], "parse");
    assert_eq!(cmd_check(&dir.path().join("missing.json")).code, EXIT_INPUT);
    let wrong_dim = write(&dir, "w.json", &json!({"N": 2, "p": 1, "q": 1, "conditions": [{"nu": [[0, 0]], "xi": [[1, 0]], "eta": [[0, 0]]}]}));
    let outcome = cmd_check(&wrong_dim);
    assert_eq!(outcome.code, EXIT_INPUT);
    assert_eq!(outcome.report["error"]["kind"], "malformed_document");
}

#[test]
fn solve_one_condition_gives_const_node() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.json", &scalar_problem(&[(0.4, 0.3)]));
    let outcome = cmd_solve(&path, &RunConfig::default());
    assert_eq!(outcome.code, EXIT_OK);
    assert_eq!(outcome.report["schema_version"], 1);
    assert_eq!(outcome.report["expr"]["node"], "const");
    let value = &outcome.report["expr"]["matrix"][0][0];
    assert!((value[0].as_f64().unwrap() - 0.3).abs() < 1e-15);
}

#[test]
fn solve_empty_problem_gives_zero() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.json", &json!({"N": 2, "p": 2, "q": 1, "conditions": []}));
    let outcome = cmd_solve(&path, &RunConfig::default());
    assert_eq!(outcome.code, EXIT_OK);
    assert_eq!(outcome.report["expr"], json!({"node": "const", "matrix": [[[0.0, 0.0]], [[0.0, 0.0]]]}));
}

#[test]
fn solve_infeasible_problem_exits_two() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "p.json", &scalar_problem(&[(0.0, 0.5), (0.0, 0.6)]));
    let outcome = cmd_solve(&path, &RunConfig::default());
    assert_eq!(outcome.code, EXIT_INFEASIBLE);
    assert_eq!(outcome.report["error"]["kind"], "not_solvable");
}

#[test]
fn disc_solution_verifies() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "p.json", &z_squared_problem());
    let solution = solve_to_file(&dir, &problem);
    let outcome = cmd_verify(&solution, &problem, &RunConfig::default());
    assert_eq!(outcome.code, EXIT_OK, "{}", render(&outcome.report));
    assert!(outcome.report["max_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(outcome.report["step_log"], Value::Null);
    assert_eq!(outcome.report["passes"], true);
}

#[test]
fn corrupted_and_large_solutions_fail_verification() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "p.json", &z_squared_problem());
    let solution = solve_to_file(&dir, &problem);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&solution).unwrap()).unwrap();
    let shift = json!({"node": "const", "matrix": [[[0.5, 0.0]]]});
    let corrupted = write(&dir, "c.json", &json!({"node": "sum", "left": doc["expr"], "right": shift}));
    let outcome = cmd_verify(&corrupted, &problem, &RunConfig::default());
    assert_eq!(outcome.code, EXIT_VERIFY);
    assert!((outcome.report["max_residual"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(outcome.report["worst_offender"].as_str().unwrap().contains("residual"));

    let two = write(&dir, "two.json", &json!({"node": "const", "matrix": [[[2.0, 0.0]]]}));
    let free = write(&dir, "free.json", &json!({"N": 1, "p": 1, "q": 1, "conditions": []}));
    let outcome = cmd_verify(&two, &free, &RunConfig::default());
    assert_eq!(outcome.code, EXIT_VERIFY);
    assert!(outcome.report["worst_offender"].as_str().unwrap().contains("Schur"));
}

#[test]
fn verify_rejects_shape_mismatch_as_input_error() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "p.json", &z_squared_problem());
    let wide = write(&dir, "s.json", &json!({"node": "const", "matrix": [[[0.0, 0.0], [0.0, 0.0]]]}));
    assert_eq!(cmd_verify(&wide, &problem, &RunConfig::default()).code, EXIT_INPUT);
}

#[test]
fn eval_examples() {
    let dir = TempDir::new().unwrap();
    let constant = write(&dir, "c.json", &json!({"node": "const", "matrix": [[[0.1, 0.2], [0.3, 0.0]]]}));
    let points = write(&dir, "pts.json", &json!([[[0.1, 0.0], [0.0, 0.0]], [[0.0, 0.3], [0.2, 0.0]], [[0.5, 0.0], [0.0, -0.5]]]));
    let outcome = cmd_eval(&constant, &points);
    assert_eq!(outcome.code, EXIT_OK);
    let values = outcome.report["values"].as_array().unwrap();
    assert_eq!(values.len(), 3);
    for v in values {
        assert_eq!(v["value"], json!([[[0.1, 0.2], [0.3, 0.0]]]));
    }

    let row = write(&dir, "b.json", &json!({"node": "blaschke_row", "alpha": [[0, 0], [0, 0]]}));
    let outcome = cmd_eval(&row, &points);
    assert_eq!(outcome.report["values"][1]["value"], json!([[[0.0, 0.3], [0.2, 0.0]]]));
}

#[test]
fn eval_reports_point_errors_and_continues() {
    let dir = TempDir::new().unwrap();
    let row = write(&dir, "b.json", &json!({"node": "blaschke_row", "alpha": [[0, 0]]}));
    let points = write(&dir, "pts.json", &json!({"points": [[[0.2, 0.0]], [[1.5, 0.0]], [[0.0, 0.0], [0.0, 0.0]], [[-0.3, 0.0]]]}));
    let outcome = cmd_eval(&row, &points);
    assert_eq!(outcome.code, EXIT_OK);
    let values = outcome.report["values"].as_array().unwrap();
    assert_eq!(values[1]["error"]["kind"], "domain_escape");
    assert_eq!(values[2]["error"]["kind"], "shape_mismatch");
    assert_eq!(values[3]["value"], json!([[[-0.3, 0.0]]]));
}

#[test]
fn eval_of_a_reloaded_solution_is_bitwise_identical() {
    let dir = TempDir::new().unwrap();
    let problem = write(
        &dir,
        "p.json",
        &json!({
            "N": 2, "p": 2, "q": 1,
            "conditions": [
                {"nu": [[0.1, 0.2], [0.3, 0.0]], "xi": [[1, 0], [0.2, 0.1]], "eta": [[0.3, -0.1]]},
                {"nu": [[-0.4, 0.0], [0.0, 0.1]], "xi": [[0.5, 0], [1, 0]], "eta": [[0.1, 0.2]]}
            ]
        }),
    );
    let solution = solve_to_file(&dir, &problem);
    let points = write(&dir, "pts.json", &json!([[[0.3, 0.1], [0.2, -0.2]], [[0.0, 0.0], [0.7, 0.0]]]));
    let first = cmd_eval(&solution, &points);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&solution).unwrap()).unwrap();
    let again = write(&dir, "again.json", &doc);
    let second = cmd_eval(&again, &points);
    assert_eq!(render(&first.report), render(&second.report));
}

#[test]
fn solve_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let problem = write(&dir, "p.json", &z_squared_problem());
    let a = render(&cmd_solve(&problem, &RunConfig::default()).report);
    let b = render(&cmd_solve(&problem, &RunConfig::default()).report);
    assert_eq!(a, b);
    let v1 = render(&cmd_verify(&solve_to_file(&dir, &problem), &problem, &RunConfig::default()).report);
    let v2 = render(&cmd_verify(&solve_to_file(&dir, &problem), &problem, &RunConfig::default()).report);
    assert_eq!(v1, v2);
}

#[test]
fn pullback_problem_end_to_end() {
    let dir = TempDir::new().unwrap();
    let embedding = json!({
        "domain_dim": 1,
        "target_dim": 2,
        "components": [[{"coeff": [0.5, 0], "exponents": [1]}], [{"coeff": [0.4, 0], "exponents": [2]}]]
    });
    let problem = write(
        &dir,
        "p.json",
        &json!({
            "N": 2, "p": 1, "q": 1,
            "conditions": [
                {"nu": [[0.3, 0.0]], "xi": [[1, 0]], "eta": [[0.2, 0.0]]},
                {"nu": [[-0.2, 0.5]], "xi": [[1, 0]], "eta": [[0.0, 0.1]]}
            ],
            "embedding": embedding
        }),
    );
    let solution = solve_to_file(&dir, &problem);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&solution).unwrap()).unwrap();
    assert_eq!(doc["expr"]["node"], "compose_embedding");
    let outcome = cmd_verify(&solution, &problem, &RunConfig::default());
    assert_eq!(outcome.code, EXIT_OK, "{}", render(&outcome.report));
}

#[test]
fn selftest_configurations() {
    let default = cmd_selftest(&RunConfig::default());
    assert_eq!(default.code, EXIT_OK, "{}", render(&default.report));
    for identity in default.report["identities"].as_array().unwrap() {
        assert!(identity["max_residual"].as_f64().unwrap() < 1e-10);
    }
    let near_sphere = cmd_selftest(&RunConfig {
        radius_cap: 0.999,
        ..RunConfig::default()
    });
    assert_eq!(near_sphere.code, EXIT_OK, "{}", render(&near_sphere.report));
    let single = cmd_selftest(&RunConfig {
        samples: 1,
        ..RunConfig::default()
    });
    assert_eq!(single.code, EXIT_OK);
    assert_eq!(
        render(&cmd_selftest(&RunConfig::default()).report),
        render(&default.report)
    );
}

#[test]
fn invalid_config_is_an_input_error() {
    let bad = RunConfig {
        radius_cap: 1.2,
        ..RunConfig::default()
    };
    assert_eq!(cmd_selftest(&bad).code, EXIT_INPUT);
}

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ballschur"))
}

#[test]
fn binary_exit_codes_and_output_file() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.json", &z_squared_problem());
    let bad = write(&dir, "bad.json", &scalar_problem(&[(0.2, 1.5)]));
    assert_eq!(binary().arg("check").arg(&good).output().unwrap().status.code(), Some(0));
    assert_eq!(binary().arg("check").arg(&bad).output().unwrap().status.code(), Some(2));

    let out = dir.path().join("solution.json");
    let status = binary().args(["solve", "--out"]).arg(&out).arg(&good).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let verify = binary().arg("verify").arg(&out).arg(&good).args(["--seed", "7", "--samples", "30"]).output().unwrap();
    assert_eq!(verify.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&verify.stdout).unwrap();
    assert_eq!(report["samples"], 30);

    let selftest = binary().args(["selftest", "--samples", "5"]).output().unwrap();
    assert_eq!(selftest.status.code(), Some(0));
    assert_eq!(binary().args(["selftest", "--radius-cap", "1.5"]).output().unwrap().status.code(), Some(1));
}
