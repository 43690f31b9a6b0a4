//! End-to-end checks of the `qbody` binary: exit codes, schemas, determinism.

use std::path::Path;
use std::process::{Command, Output};

fn qbody(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbody"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

#[test]
fn xo_reports_matching_mixture_and_closed_form() {
    let json = stdout_json(&qbody(&["xo", "--m", "4"]));
    assert!(json["max_abs_difference"].as_f64().unwrap() < 1e-12);
    assert_eq!(json["m"], 4);
    let diag = json["closed_form_matrix"]["entries"][1][1].as_f64().unwrap();
    let off = json["closed_form_matrix"]["entries"][1][2].as_f64().unwrap();
    assert_eq!(diag, -0.5);
    assert_eq!(off, 0.5);
    assert_eq!(json["mixture"]["m_a"], 4);
}

#[test]
fn xo_for_two_settings_has_the_swap_interior() {
    let json = stdout_json(&qbody(&["xo", "--m", "2"]));
    let entries = &json["closed_form_matrix"]["entries"];
    assert_eq!(entries[1][1], 0.0);
    assert_eq!(entries[1][2].as_f64(), Some(1.0));
    assert_eq!(entries[2][1].as_f64(), Some(1.0));
    assert_eq!(entries[2][2], 0.0);
}

#[test]
fn odd_m_is_a_usage_error() {
    let out = qbody(&["xo", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m must be even"));
}

#[test]
fn witness_verdicts() {
    let json = stdout_json(&qbody(&["witness", "--m", "4", "--d", "2"]));
    assert_eq!(json["rank"], 5);
    assert_eq!(json["threshold"], 4);
    assert_eq!(json["excluded"], true);

    let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 4);
    for key in ["rank", "d", "threshold", "excluded"] {
        assert!(keys.contains(&key));
    }

    let json = stdout_json(&qbody(&["witness", "--m", "4", "--d", "3"]));
    assert_eq!(json["excluded"], false);

    let json = stdout_json(&qbody(&["witness", "--m", "8", "--d", "2"]));
    assert_eq!(json["rank"], 9);
    assert_eq!(json["excluded"], true);
}

#[test]
fn seesaw_reaches_the_maximum_and_is_deterministic() {
    let args = ["seesaw", "--m", "4", "--trials", "12", "--seed", "5"];
    let first = qbody(&args);
    let second = qbody(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "same seed must give identical bytes");

    let json = stdout_json(&first);
    assert!((json["value"].as_f64().unwrap() - 8.0).abs() < 1e-6);
    assert_eq!(json["m"], 4);
    assert!(json["converged"].as_bool().unwrap());
}

#[test]
fn seesaw_is_deterministic_across_parallelism() {
    let sequential = qbody(&["seesaw", "--m", "2", "--trials", "8", "--seed", "11"]);
    let parallel = qbody(&["seesaw", "--m", "2", "--trials", "8", "--seed", "11", "--parallel", "4"]);
    assert_eq!(sequential.stdout, parallel.stdout);
}

#[test]
fn certify_closes_the_gap() {
    let json = stdout_json(&qbody(&["certify", "--m", "4"]));
    assert_eq!(json["primal"].as_f64(), Some(8.0));
    assert_eq!(json["dual"].as_f64(), Some(8.0));
    assert_eq!(json["gap"].as_f64(), Some(0.0));
    assert!(json["min_eig_slack"].as_f64().unwrap() >= -1e-9);
    assert_eq!(json["lambda"].as_array().unwrap().len(), 8);

    let json = stdout_json(&qbody(&["certify", "--m", "6"]));
    assert_eq!(json["primal"].as_f64(), Some(18.0));
    assert_eq!(json["dual"].as_f64(), Some(18.0));

    let json = stdout_json(&qbody(&["certify", "--m", "1"]));
    assert_eq!(json["primal"].as_f64(), Some(0.5));
    assert_eq!(json["dual"].as_f64(), Some(0.5));
}

#[test]
fn realize_reproduces_the_witness_point() {
    for (m, dim) in [(2usize, 2u64), (4, 4), (6, 8)] {
        let json = stdout_json(&qbody(&["realize", "--m", &m.to_string()]));
        assert_eq!(json["local_dimension"].as_u64(), Some(dim), "m={m}");
        assert!(json["max_deviation"].as_f64().unwrap() < 1e-10, "m={m}");
        assert_eq!(json["witness"]["excluded"], false, "m={m}");
    }
}

#[test]
fn realize_rejects_oversized_requests() {
    let out = qbody(&["realize", "--m", "18"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cone_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("cone.csv");
    let out = qbody(&["cone", "--grid", "8", "--out", csv_path.to_str().unwrap()]);
    let summary = stdout_json(&out);

    assert_eq!(summary["grid_density"], 8);
    assert_eq!(summary["projective"]["exterior"], 0);
    assert_eq!(summary["povm"]["exterior"], 0);
    assert!(summary["projective"]["apex"].as_u64().unwrap() >= 2);
    assert!(summary["povm"]["interior"].as_u64().unwrap() > 0);

    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kind,alpha,bloch1,bloch2,bloch3,x,y,z,class"
    );
    let body: Vec<&str> = lines.collect();
    let expected_rows = summary["projective"]["total"].as_u64().unwrap()
        + summary["povm"]["total"].as_u64().unwrap();
    assert_eq!(body.len() as u64, expected_rows);
    assert!(body.iter().all(|l| l.starts_with("projective,") || l.starts_with("povm,")));

    // No projective row may sit on the open lateral surface.
    for line in &body {
        if line.starts_with("projective,") {
            let fields: Vec<&str> = line.split(',').collect();
            let z: f64 = fields[7].parse().unwrap();
            let class = fields[8];
            assert!(
                class != "lateral-surface" || z.abs() <= 1e-6 || z.abs() >= 1.0 - 1e-6,
                "projective open-lateral row: {line}"
            );
        }
    }
}

#[test]
fn cone_without_out_is_a_usage_error() {
    let out = qbody(&["cone", "--grid", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let missing = Path::new("/nonexistent-dir/qbody-out.csv");
    let out = qbody(&["cone", "--grid", "4", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn csv_format_is_rejected_outside_cone() {
    let out = qbody(&["certify", "--m", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_are_usage_errors() {
    let out = qbody(&["certify", "--m", "2", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_redirects_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verdict.json");
    let out = qbody(&["witness", "--m", "4", "--d", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["excluded"], true);
}

#[test]
fn behavior_json_round_trips_losslessly() {
    let json = stdout_json(&qbody(&["seesaw", "--m", "3", "--trials", "3", "--seed", "2"]));
    let value = json["value"].as_f64().unwrap();
    let reparsed: serde_json::Value =
        serde_json::from_str(&serde_json::to_string(&json).unwrap()).unwrap();
    assert_eq!(reparsed["value"].as_f64().unwrap().to_bits(), value.to_bits());
}

#[test]
fn tolerance_profile_is_accepted() {
    let out = qbody(&["witness", "--m", "4", "--d", "2", "--tolerance-profile", "strict"]);
    assert!(out.status.success());
    let out = qbody(&["witness", "--m", "4", "--d", "2", "--rank-eps", "1e-6"]);
    assert!(out.status.success());
    let out = qbody(&["witness", "--m", "4", "--d", "2", "--rank-eps", "-1.0"]);
    assert_eq!(out.status.code(), Some(2));
}
