//! End-to-end tests of the `lcarev` binary: command surfaces, JSON
//! stability, exit codes, and the cache files.

use std::process::{Command, Output};

fn lcarev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcarev"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(out).trim()).expect("valid JSON")
}

#[test]
fn period_command() {
    let out = lcarev(&["period", "--rule", "10011", "--left", "2"]);
    assert!(stdout(&out).contains("period  15"));
    let v = json(&lcarev(&["period", "--poly", "11111", "--json"]));
    assert_eq!(v["period"], "5");
    assert_eq!(v["poly"]["sparse"], "x^4+x^3+x^2+x+1");
    // sparse input accepted
    let v = json(&lcarev(&["period", "--poly", "x^4+x^3+x^2+x+1", "--json"]));
    assert_eq!(v["period"], "5");
    // the identity rule
    let v = json(&lcarev(&["period", "--rule", "1", "--left", "0", "--json"]));
    assert_eq!(v["period"], "1");
}

#[test]
fn residues_methods_agree() {
    let sbp = json(&lcarev(&["residues", "--rule", "11111", "--left", "2", "--json"]));
    assert_eq!(sbp["period"], "5");
    assert_eq!(sbp["residues"], serde_json::json!([0, 1]));
    let dfa = json(&lcarev(&["residues", "--rule", "11111", "--left", "2", "--method", "dfa", "--json"]));
    assert_eq!(dfa["residues"], sbp["residues"]);
    let mat = json(&lcarev(&["residues", "--rule", "11111", "--left", "2", "--method", "matrix", "--n-max", "10", "--json"]));
    assert_eq!(mat["reversible_n"], serde_json::json!([1, 5, 6, 10]));
}

#[test]
fn residues_unilateral_routes() {
    let v = json(&lcarev(&["residues", "--rule", "111", "--left", "0", "--json"]));
    assert_eq!(v["route"], "unilateral");
    let v = json(&lcarev(&["residues", "--rule", "011", "--left", "0", "--json"]));
    assert_eq!(v["route"], "one-sided");
    assert_eq!(v["residues"], serde_json::json!([]));
}

#[test]
fn check_command() {
    let v = json(&lcarev(&["check", "--rule", "11111", "--left", "2", "-n", "10", "--json"]));
    assert_eq!((v["reversible"].as_bool(), v["route"].as_str()), (Some(true), Some("sbp")));
    let v = json(&lcarev(&["check", "--rule", "11111", "--left", "2", "-n", "7", "--json"]));
    assert_eq!(v["reversible"], false);
    let v = json(&lcarev(&["check", "--rule", "111", "--left", "1", "-n", "4", "--json"]));
    assert_eq!(v["reversible"], true);
    // unilateral shortcut answers instantly for any n
    let v = json(&lcarev(&["check", "--rule", "11", "--left", "0", "-n", "123456789012345678901234567890", "--json"]));
    assert_eq!((v["reversible"].as_bool(), v["route"].as_str()), (Some(true), Some("unilateral")));
}

#[test]
fn generate_command() {
    let v = json(&lcarev(&["generate", "84", "--g-mode", "paper", "--json"]));
    assert_eq!(v["lower_bound"], "64");
    let v = json(&lcarev(&["generate", "360", "--g-mode", "paper", "--json"]));
    assert_eq!(v["lower_bound"], "448");
    let v = json(&lcarev(&["generate", "6", "--json"]));
    assert_eq!(v["count"], 4);
    assert_eq!(v["items"].as_array().unwrap().len(), 4);
    // every emitted rule string reads back as a polynomial of period T
    for item in v["items"].as_array().unwrap() {
        let poly = item["poly"]["bits"].as_str().unwrap();
        let p = json(&lcarev(&["period", "--poly", poly, "--json"]));
        assert_eq!(p["period"], "6");
    }
    let v = json(&lcarev(&["generate", "6", "--all-splits", "--json"]));
    assert!(v["count"].as_u64().unwrap() > 4);
}

#[test]
fn factor_command() {
    let v = json(&lcarev(&["factor", "84", "--json"]));
    assert_eq!(v["factors"], serde_json::json!([["2", 2], ["3", 1], ["7", 1]]));
    let v = json(&lcarev(&["factor", "33554431", "--json"]));
    assert_eq!(v["factors"], serde_json::json!([["31", 1], ["601", 1], ["1801", 1]]));
}

#[test]
fn table_command_feeds_generate() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    let out = lcarev(&["table", "--max-degree", "6", "--period-table", table.to_str().unwrap(), "--json"]);
    let v = json(&out);
    assert_eq!(v["max_degree"], 6);
    assert!(table.exists());
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.contains("1001001")); // x^6+x^3+1, period 9
    // x^6+x^3+1 times optional (x+1) and/or (x^2+x+1): lcm stays 9
    let v = json(&lcarev(&[
        "generate", "9", "--period-table", table.to_str().unwrap(), "--json",
    ]));
    assert_eq!(v["count"].as_u64().unwrap(), 4);
    assert_eq!(v["items"][0]["poly"]["bits"], "1001001");
}

#[test]
fn factor_cache_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.json");
    let out = lcarev(&["factor", "9223372036854775807", "--factor-cache", cache.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(cache.exists());
    let text = std::fs::read_to_string(&cache).unwrap();
    assert!(text.contains("9223372036854775807"));
    // same cache through the environment variable
    let out = Command::new(env!("CARGO_BIN_EXE_lcarev"))
        .env("LCAREV_FACTOR_CACHE", cache.to_str().unwrap())
        .args(["factor", "9223372036854775807", "--json"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["factors"][0], serde_json::json!(["7", 2]));
}

#[test]
fn simulate_command() {
    let out = lcarev(&["simulate", "--rule", "111", "--left", "1", "--init", "010", "--steps", "1"]);
    let text = stdout(&out);
    assert!(text.contains("t=0    010") && text.contains("t=1    111"));
    let v = json(&lcarev(&["simulate", "--rule", "11", "--left", "0", "--init", "01", "--steps", "1", "--json"]));
    assert_eq!(v["steps"], serde_json::json!(["01", "11"]));
    let v = json(&lcarev(&["simulate", "--rule", "11011", "--left", "2", "--init", "000", "--steps", "3", "--json"]));
    assert_eq!(v["steps"], serde_json::json!(["000", "000", "000", "000"]));
}

#[test]
fn emit_dfa_and_trace_files() {
    let dir = tempfile::tempdir().unwrap();
    let dfa = dir.path().join("dfa.json");
    let trace = dir.path().join("trace.jsonl");
    let out = lcarev(&[
        "residues", "--rule", "11111", "--left", "2",
        "--emit-dfa", dfa.to_str().unwrap(),
        "--trace", trace.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let dfa_doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dfa).unwrap()).unwrap();
    assert_eq!(dfa_doc["period"], 5);
    let nodes = dfa_doc["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 5);
    assert_eq!(nodes[0]["tuples"][0], "0000");
    assert_eq!(nodes[0]["reversible"], true);
    let lines: Vec<serde_json::Value> = std::fs::read_to_string(&trace)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[0]["rank"], 2);
    assert_eq!(lines[0]["rows"], serde_json::json!(["0001", "0010"]));
    // reversible flags along the trace match the residues {0, 1}
    let flags: Vec<bool> = lines.iter().map(|l| l["reversible"].as_bool().unwrap()).collect();
    assert_eq!(flags, vec![true, true, false, false, false]);
}

#[test]
fn bench_command_with_suite() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.json");
    std::fs::write(
        &suite,
        r#"[{"rule":"10011","methods":["PP","TMS"]},{"rule":"1000011","left":3,"methods":["DFA","SBP"]}]"#,
    )
    .unwrap();
    let v = json(&lcarev(&["bench", "--suite", suite.to_str().unwrap(), "--budget", "5", "--json"]));
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 4);
    for r in records {
        assert_eq!(r["timeout"], false, "{r}");
    }
    let pp = records.iter().find(|r| r["method"] == "PP").unwrap();
    assert_eq!(pp["outcome"], "15");
    // empty suite stays empty
    std::fs::write(&suite, "[]").unwrap();
    let v = json(&lcarev(&["bench", "--suite", suite.to_str().unwrap(), "--json"]));
    assert_eq!(v["records"].as_array().unwrap().len(), 0);
}

#[test]
fn json_output_round_trips_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.json");
    std::fs::write(&suite, r#"[{"rule":"10011","methods":["PP"]}]"#).unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["period", "--rule", "10011", "--left", "2", "--json"],
        vec!["residues", "--rule", "11111", "--left", "2", "--json"],
        vec!["check", "--rule", "111", "--left", "1", "-n", "4", "--json"],
        vec!["generate", "6", "--json"],
        vec!["factor", "84", "--json"],
        vec!["simulate", "--rule", "111", "--left", "1", "--init", "010", "--steps", "2", "--json"],
    ];
    for args in commands {
        let out = stdout(&lcarev(&args));
        let value: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        let rendered = serde_json::to_string(&value).unwrap();
        assert_eq!(rendered, out.trim(), "round trip differs for {args:?}");
    }
}

#[test]
fn exit_codes_per_error_family() {
    // 3: malformed input
    assert_eq!(lcarev(&["period", "--rule", "10a1"]).status.code(), Some(3));
    assert_eq!(lcarev(&["period", "--poly", "10"]).status.code(), Some(3));
    // 4: all-zero rule
    assert_eq!(lcarev(&["period", "--rule", "000"]).status.code(), Some(4));
    // 5: cap exceeded (split out of range is input, degree over cap is cap)
    assert_eq!(lcarev(&["period", "--rule", "111", "--left", "9"]).status.code(), Some(3));
    let big_poly = format!("x^{}+1", 5000);
    assert_eq!(lcarev(&["period", "--poly", &big_poly]).status.code(), Some(5));
    // 2: clap usage error
    assert_eq!(lcarev(&["period"]).status.code(), Some(3));
    assert_eq!(lcarev(&["nosuchcommand"]).status.code(), Some(2));
    // 0: success
    assert_eq!(lcarev(&["period", "--rule", "111"]).status.code(), Some(0));
}

#[test]
fn default_split_is_symmetric() {
    // --left omitted: floor((m-1)/2); for 11111 that is 2
    let a = json(&lcarev(&["residues", "--rule", "11111", "--json"]));
    let b = json(&lcarev(&["residues", "--rule", "11111", "--left", "2", "--json"]));
    assert_eq!(a, b);
}
