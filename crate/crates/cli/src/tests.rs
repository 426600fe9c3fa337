use std::fs;

use serde_json::Value;

use super::run;

fn call(args: &str) -> super::Outcome {
    run(std::iter::once("rsumset").chain(args.split_whitespace()))
}

fn json(args: &str) -> (i32, Value) {
    let out = call(args);
    let v = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.code, v)
}

#[test]
fn fpmatch_reports_true_value_and_audit_failure() {
    let (code, v) = json("construct --family fpmatch --p 23 --format json");
    assert_eq!(code, 1);
    assert_eq!(v["A"]["members"].as_array().map(|a| a.len()), Some(9));
    assert_eq!(v["auditReport"]["evaluatedValue"], 19);
    let (code, v) = json("construct --family fpmatch --p 37");
    assert_eq!(code, 0);
    assert_eq!(v["auditReport"]["evaluatedValue"], 34);
}

#[test]
fn composite_modulus_is_usage_error() {
    let out = call("minimize --p 6 --a 0,1 --b 0,1 --constraint function-b");
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("not prime"));
}

#[test]
fn unknown_flag_and_bad_literal_are_usage_errors() {
    assert_eq!(call("construct --family corner --n 5 --d 1 --bogus 3").code, 2);
    assert_eq!(call("minimize --a 0,x --b 1 --constraint function-b").code, 2);
    assert_eq!(call("scan --kind lev --p 7 --sample 10").code, 2);
}

#[test]
fn minimize_example() {
    let (code, v) = json("minimize --p 7 --a 0,2,4,5,6 --b 0,4,5,6 --constraint function-b --budget 1e7");
    assert_eq!(code, 0);
    assert_eq!(v["optimal"], true);
    assert_eq!(v["total"], true);
    let (_, z) = json("minimize --a 0,1,2 --b 0,1 --constraint degree-b --d 1");
    assert_eq!(z["constraint"], "degree-b:1");
}

#[test]
fn scan_writes_rows_only_after_success() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let o = call(&format!("scan --kind lev --p 7 --out {}", out.display()));
    assert_eq!(o.code, 0, "{}", o.stderr);
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["violation"] == false));
    let bad = dir.path().join("bad.jsonl");
    assert_eq!(call(&format!("scan --kind lev --p 9 --out {}", bad.display())).code, 2);
    assert!(!bad.exists());
}

#[test]
fn formats_render() {
    let csv = call("scan --kind lev --p 5 --format csv");
    assert!(csv.stdout.lines().next().unwrap().contains("minValue"));
    let text = call("verify --what rprofile --p 7 --a 0,1,3 --f 0,1 --format text");
    assert!(text.stdout.contains("totalHolds: true"));
    let kv = call("rectify --p 101 --set 1,50 --format csv");
    assert!(kv.stdout.starts_with("key,value"));
}

#[test]
fn verify_and_rectify_examples() {
    let (_, v) = json("verify --what rprofile --p 7 --a 0,1,3 --f 0,1");
    assert_eq!(v["r"], serde_json::json!([2, 4, 1]));
    let (_, v) = json("verify --what sidon --p 23 --f 21,22,2");
    assert_eq!(v["sidon"], true);
    let (code, v) = json("rectify --p 101 --set 1,50");
    assert_eq!(code, 0);
    assert_eq!(v["t"], 2);
    assert_eq!(v["verified"], true);
    assert_eq!(v["image"], serde_json::json!([-1, 2]));
}

#[test]
fn stability_commands() {
    let (code, v) = json("stability --p 8209 --synthesize --b-size 2 --r 0 --report json");
    assert_eq!(code, 0);
    assert_eq!(v["allOk"], true);
    let (code, v) = json("stability --ledger --eps 1/2 --d 1");
    assert_eq!(code, 0);
    assert_eq!(v["p0"], "1048576");
}

#[test]
fn records_replay_and_detect_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.jsonl");
    let l = log.display();
    assert_eq!(call(&format!("scan --kind lev --p 7 --jobs 1 --record {l}")).code, 0);
    assert_eq!(call(&format!("construct --family corner --n 6 --d 2 --record {l}")).code, 0);
    assert_eq!(call(&format!("scan --kind z_fiveDhalf --n 6 --d 1 --sample 20 --seed 3 --record {l}")).code, 0);
    let (code, v) = json(&format!("replay {l} --jobs 4"));
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "all-equal");
    assert_eq!(v["records"], 3);

    let text = fs::read_to_string(&log).unwrap();
    let mut lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    lines[1]["result"]["predictedValue"] = serde_json::json!(999);
    let tampered_id = lines[1]["id"].clone();
    let body: String = lines.iter().map(|v| format!("{v}\n")).collect();
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, body).unwrap();
    let (code, v) = json(&format!("replay {}", bad.display()));
    assert_eq!(code, 1);
    assert_eq!(v["drift"], serde_json::json!([tampered_id]));
}

#[test]
fn record_ids_ignore_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("ids.jsonl");
    let l = log.display();
    call(&format!("scan --kind lev --p 5 --jobs 1 --record {l}"));
    call(&format!("scan --kind lev --p 5 --jobs 3 --record={l}"));
    let ids: Vec<String> = fs::read_to_string(&log)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["id"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(ids.len(), 2);
    assert_eq!(ids[0], ids[1]);
}

#[test]
fn help_exits_zero() {
    let out = call("--help");
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("construct"));
}
