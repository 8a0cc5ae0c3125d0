use std::process::{Command, Output};

use serde_json::Value;

fn heights(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heights"))
        .args(args)
        .env_remove("HEIGHTS_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(args: &[&str]) -> Value {
    let out = heights(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(&out)).expect("valid JSON")
}

fn csv(args: &[&str]) -> Vec<Vec<String>> {
    let out = heights(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    let schema = lines.next().expect("schema line");
    assert!(schema.starts_with("# schema: heights/") && schema.ends_with("/v1"), "{schema}");
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn poles_table_matches_printed_values() {
    let rows = csv(&["poles-table", "--dmax", "6"]);
    assert_eq!(rows[0], ["n", "s_2", "s_3"]);
    let expected = [
        ["2", "1.0000000000", "1.0000000000"],
        ["3", "3.3219280949", "2.7712437492"],
        ["4", "4.9068905956", "4.1257498573"],
        ["5", "6.2854022189", "5.3653166773"],
        ["6", "7.5698556083", "6.5507064185"],
    ];
    assert_eq!(rows.len(), 6);
    for (row, want) in rows[1..].iter().zip(expected) {
        assert_eq!(row, &want);
    }
}

#[test]
fn sphere_example() {
    let v = json(&["sphere", "--d", "3", "--p", "2", "--k", "2"]);
    assert_eq!(v["schema"], "heights/sphere/v1");
    assert_eq!(v["size"], "140");
    assert_eq!(v["vertex_count"], "98");
    let v = json(&["sphere", "--group", "sl2", "--p", "3", "--k", "2"]);
    assert_eq!(v["group"], "sl2");
}

#[test]
fn height_of_identity_is_one() {
    let v = json(&["height", "--matrix", "1,0;0,1", "--B", "1"]);
    assert_eq!(v["schema"], "heights/height/v1");
    assert_eq!(v["profile"]["h"].as_f64(), Some(1.0));
    assert_eq!(v["profile"]["h_fin"], "1");
}

#[test]
fn height_of_rational_matrix() {
    let v = json(&["height", "--matrix", "1/2,0;0,1", "--B", "1"]);
    assert_eq!(v["matrix"], serde_json::json!([[1, 0], [0, 2]]));
    assert_eq!(v["profile"]["h_fin"], "2");
    let h = v["profile"]["h"].as_f64().unwrap();
    assert!((h - 2.0 * 2f64.sqrt()).abs() < 1e-10);
}

#[test]
fn ball_is_partial_sum_of_spheres() {
    let rows = csv(&["ball", "--d", "2", "--p", "3", "--k", "4"]);
    assert_eq!(rows[0], ["k", "sphere", "ball"]);
    let mut acc = 0u64;
    for r in &rows[1..] {
        acc += r[1].parse::<u64>().unwrap();
        assert_eq!(r[2].parse::<u64>().unwrap(), acc);
    }
    assert_eq!(acc, 161);
}

#[test]
fn classes_are_json_lines() {
    let out = heights(&["classes", "--d", "2", "--p", "2", "--kmax", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["schema"], "heights/classes/v1");
    assert_eq!(lines[0]["count"], 10);
    assert_eq!(lines.len(), 11);
    let at_two = lines[1..].iter().filter(|l| l["distance"] == 2).count();
    assert_eq!(at_two, 6);
}

#[test]
fn lseries_closed_form_agrees() {
    let v = json(&["lseries", "--d", "2", "--s", "3,0", "--closed-form"]);
    assert!(v["relative_difference"].as_f64().unwrap() < 1e-8);
    let v = json(&["lseries", "--group", "sl2", "--s", "2.5", "--closed-form"]);
    assert!(v["relative_difference"].as_f64().unwrap() < 1e-8);
    let out = heights(&["lseries", "--d", "3", "--s", "4", "--closed-form"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn residue_pgl2() {
    let v = json(&["residue", "--variant", "pgl2"]);
    let direct = v["direct"].as_f64().unwrap();
    assert!((direct - 15.0 / std::f64::consts::PI.powi(2)).abs() < 1e-10);
}

#[test]
fn dcoeff_small_values() {
    let rows = csv(&["dcoeff", "--d", "2", "--xmax", "6"]);
    let d: Vec<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(d, ["1", "3", "4", "6", "6", "12"]);
    assert_eq!(rows.last().unwrap()[2], "32");
}

#[test]
fn ball_volume_rank_one() {
    let rows = csv(&["ball-volume", "--d", "2", "--B", "1", "--Rmax", "3", "--samples", "3"]);
    assert_eq!(rows[0], ["R", "volume", "log_volume"]);
    for r in &rows[1..] {
        let (radius, v): (f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap());
        let exact = ((2.0 * radius).cosh() - 1.0) / 2.0;
        assert!((v / exact - 1.0).abs() < 1e-9);
    }
}

#[test]
fn ball_adelic_grid() {
    let rows = csv(&["ball-adelic", "--d", "2", "--B", "1", "--Tmax", "2", "--step", "0.5"]);
    assert_eq!(rows[0], ["T", "b"]);
    let values: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(values.len(), 4);
    assert!(values.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn predict_has_both_conventions() {
    let v = json(&["predict", "--d", "2", "--B", "3", "--T", "1"]);
    let labels: Vec<&str> = v["conventions"].as_array().unwrap().iter().map(|c| c["label"].as_str().unwrap()).collect();
    assert_eq!(labels, ["E=B", "E=2B"]);
}

#[test]
fn count_writes_csv_file() {
    let path = std::env::temp_dir().join(format!("heights-count-{}.csv", std::process::id()));
    let out = heights(&["count", "--xmax", "2", "--B", "1", "--csv", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# schema: heights/count/v1");
    assert_eq!(lines[1], "x,pi,predicted_convA,predicted_convB,lower_sandwich,upper_sandwich");
    let pis: Vec<&str> = lines[2..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(pis, ["0", "4", "4", "24"]);
}

#[test]
fn regularity_verdicts() {
    let v = json(&["regularity", "--function", "x-exp"]);
    assert_eq!(v["report"]["verdict"], "regular");
    let v = json(&["regularity", "--function", "floor-exp"]);
    assert_eq!(v["report"]["verdict"], "non-regular");
}

#[test]
fn persistence_at_twelve() {
    let v = json(&["persistence", "--T", "12"]);
    let ratio = v["points"][0]["ratio"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 0.03);
}

#[test]
fn exit_codes() {
    let out = heights(&["sphere", "--d", "3", "--p", "4", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = heights(&["height", "--matrix", "1,2;2,4"]);
    assert_eq!(out.status.code(), Some(1));
    let out = heights(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let out = heights(&["sphere", "--d", "x", "--p", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = heights(&["classes", "--d", "3", "--p", "5", "--kmax", "5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = heights(&["dcoeff", "--d", "2", "--xmax", "5000", "--budget", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_heights"))
        .args(["dcoeff", "--d", "2", "--xmax", "5000"])
        .env("HEIGHTS_BUDGET", "1e3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(heights(&["--help"]).status.success());
}

#[test]
fn verify_quick_is_deterministic() {
    let runs: Vec<Output> = [["--workers", "1"], ["--workers", "4"], ["--workers", "4"]]
        .iter()
        .map(|w| heights(&["verify", "--quick", w[0], w[1]]))
        .collect();
    let text = stdout(&runs[0]);
    assert!(text.contains("AC1    PASS"));
    for r in &runs[1..] {
        assert_eq!(stdout(r), text);
        assert_eq!(r.status.code(), runs[0].status.code());
    }
    let all_pass = !text.lines().any(|l| l.starts_with("AC") && l.contains("FAIL"));
    assert_eq!(runs[0].status.success(), all_pass);
}
