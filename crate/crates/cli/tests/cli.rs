use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn stairstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stairstab"))
        .args(args)
        .env_remove("STAIRSTAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(text: &str) -> Vec<Value> {
    text.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn schema() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("runrecord.schema.json");
    let schema: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(records: &[Value]) {
    let v = schema();
    for r in records {
        let errors: Vec<String> = v.iter_errors(r).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{r}: {errors:?}");
    }
}

#[test]
fn types_lists_normalized_types() {
    let out = stairstab(&["types", "--dim", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "{}\n{2}\n");
    let out = stairstab(&["types", "--dim", "4", "--json"]);
    let v: Vec<String> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v, ["{}", "{2}", "{3}", "{2,3}"]);
    let out = stairstab(&["types", "--dim", "2", "--json"]);
    assert_eq!(stdout(&out).trim(), r#"["{}"]"#);
}

#[test]
fn eval_grid_and_diagonal() {
    let out = stairstab(&[
        "eval",
        "--family",
        "grid",
        "--dim",
        "3",
        "--q",
        "1,1,0.8",
        "--p",
        "0.5,0.5,0",
    ]);
    assert!(out.status.success());
    let recs = json_lines(&stdout(&out));
    assert_valid(&recs);
    assert!((recs[0]["value"].as_f64().unwrap() - 0.04).abs() < 1e-15);
    assert_eq!(recs[0]["type"], "{}");

    let out = stairstab(&["eval", "--family", "diag", "--dim", "3", "--theorem2"]);
    let recs = json_lines(&stdout(&out));
    assert_valid(&recs);
    assert_eq!(recs[0]["value"].as_f64().unwrap(), 0.04);
    assert_eq!(recs[0]["family"], "diagonal_theorem2");

    let out = stairstab(&[
        "eval", "--family", "diag", "--dim", "2", "--q", "1,3/4", "--p", "1/4,1/2",
    ]);
    let recs = json_lines(&stdout(&out));
    assert_eq!(recs[0]["value"].as_f64().unwrap(), 0.1875);
}

#[test]
fn eval_reports_the_violated_condition() {
    let out = stairstab(&[
        "eval",
        "--family",
        "diag",
        "--dim",
        "3",
        "--q",
        "1,0.6,0.8",
        "--p",
        "0.2,0.7,0.7",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("p_i ≤ q_i"), "{err}");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(stairstab(&["bogus"]).status.code(), Some(1));
    assert_eq!(stairstab(&["types"]).status.code(), Some(1));
    assert_eq!(
        stairstab(&["eval", "--family", "grid", "--dim", "3", "--q", "1,1", "--p", "0,0,0"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        stairstab(&["maximize", "--family", "grid", "--dim", "7"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        stairstab(&["maximize", "--family", "diag3", "--dim", "4"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(stairstab(&["--help"]).status.code(), Some(0));
}

#[test]
fn budget_errors_exit_with_three() {
    let out = stairstab(&[
        "maximize", "--family", "grid", "--dim", "4", "--budget", "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = stairstab(&[
        "verify", "--mode", "census", "--dim", "3", "--size", "5", "--limit", "1000",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn maximize_writes_schema_valid_records() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d4.jsonl");
    let out = stairstab(&[
        "maximize",
        "--family",
        "grid",
        "--dim",
        "4",
        "--seed",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let recs = json_lines(&fs::read_to_string(&path).unwrap());
    assert_valid(&recs);
    assert_eq!(recs.len(), 5);
    let overall = recs.last().unwrap();
    assert_eq!(overall["command"], "maximize_overall");
    assert!((overall["value"].as_f64().unwrap() - 0.00457936).abs() < 1e-6);

    let out = stairstab(&["maximize", "--family", "fsl", "--dim", "2"]);
    let recs = json_lines(&stdout(&out));
    assert_valid(&recs);
    assert!((recs[0]["value"].as_f64().unwrap() - 1.0 / 27.0).abs() < 1e-9);

    let out = stairstab(&[
        "maximize",
        "--family",
        "grid",
        "--dim",
        "4",
        "--type",
        "{2,3}",
        "--method",
        "nelder_mead",
    ]);
    let recs = json_lines(&stdout(&out));
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["type"], "{2,3}");
    assert_eq!(recs[0]["method"], "nelder_mead");
}

#[test]
fn diag3_overall_is_one_twenty_fifth() {
    let out = stairstab(&["maximize", "--family", "diag3", "--seed", "1"]);
    let recs = json_lines(&stdout(&out));
    assert_valid(&recs);
    assert_eq!(recs.len(), 16);
    assert!((recs[15]["value"].as_f64().unwrap() - 0.04).abs() < 1e-9);
}

#[test]
fn maximize_is_reproducible_across_thread_counts() {
    let strip = |text: String| -> Vec<Value> {
        json_lines(&text)
            .into_iter()
            .map(|mut v| {
                v.as_object_mut().unwrap().remove("wall_ms");
                v
            })
            .collect()
    };
    let args = [
        "maximize", "--family", "grid", "--dim", "4", "--seed", "5", "--budget", "20000",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_stairstab"))
        .args(args)
        .env("STAIRSTAB_THREADS", "1")
        .output()
        .unwrap();
    let four = Command::new(env!("CARGO_BIN_EXE_stairstab"))
        .args(["--threads", "4"])
        .args(args)
        .output()
        .unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(strip(stdout(&one)), strip(stdout(&four)));
}

#[test]
fn verify_modes() {
    let out = stairstab(&[
        "verify",
        "--mode",
        "mc",
        "--dim",
        "3",
        "--samples",
        "200000",
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pass"], true);

    let out = stairstab(&[
        "verify", "--mode", "census", "--dim", "2", "--size", "3", "--expect", "11/36",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["detail"]["sizes"][0]["fraction"], "11/36");

    let out = stairstab(&[
        "verify", "--mode", "census", "--dim", "2", "--size", "3", "--expect", "1/3",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = stairstab(&[
        "verify",
        "--mode",
        "transference",
        "--dim",
        "3",
        "--size",
        "5",
        "--trials",
        "300",
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["detail"]["sizes"][0]["mismatches"], 0);
}

#[test]
fn verify_rejects_invalid_diagonal_paths() {
    let out = stairstab(&[
        "verify",
        "--mode",
        "mc",
        "--family",
        "diag",
        "--dim",
        "3",
        "--q",
        "1,1,0.8",
        "--p",
        "0.5,0.5,0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p_i ≤ p_{i+1}"));
}

#[test]
fn report_writes_tables_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = stairstab(&["report", "--out", dir.path().to_str().unwrap()]);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", summary["failed"]);
    assert_eq!(summary["all_pass"], true);
    assert_eq!(summary["findings"].as_array().unwrap().len(), 0);
    for name in [
        "grid_d3.csv",
        "grid_d4.csv",
        "grid_d5.csv",
        "grid_d6.csv",
        "diag3.csv",
        "diagonal_long_path.csv",
        "fsl.csv",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let mut d5 = csv::Reader::from_path(dir.path().join("grid_d5.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = d5.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 8);
    let best = rows
        .iter()
        .map(|r| r[11].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!((best - 0.000405335).abs() < 1e-6);
    let diag = csv::Reader::from_path(dir.path().join("diag3.csv"))
        .unwrap()
        .records()
        .count();
    assert_eq!(diag, 15);
    let bounds = summary["upper_bounds"].as_array().unwrap();
    assert!(bounds
        .iter()
        .any(|b| b.as_str().unwrap().starts_with("c_{3,1} <= 1/25")));
}
