use std::path::Path;
use std::process::Command;

use moea_core::harness::{run_plan, ExperimentPlan, CSV_HEADER};

const PLAN: &str = r#"
master_seed = 42
trials_per_cell = 3

[[cells]]
algorithm = "spea2"
problem = "omm"
m = 2
n = 8

[[cells]]
algorithm = "semo"
problem = "lotz"
m = 4
n = 8

[[cells]]
algorithm = "gsemo"
problem = "ojzj"
m = 2
n = 8
k = 2
"#;

fn moea() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_moea"));
    c.env_remove("MOEA_WORKERS");
    c
}

#[test]
fn sweep_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.toml");
    std::fs::write(&plan, PLAN).unwrap();
    let csv = dir.path().join("out.csv");
    let json = dir.path().join("out.json");

    let status = moea()
        .args(["sweep", "--plan"])
        .arg(&plan)
        .arg("--out")
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), 9);

    let status = moea()
        .args(["sweep", "--workers", "2", "--plan"])
        .arg(&plan)
        .arg("--out")
        .arg(&json)
        .status()
        .unwrap();
    assert!(status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!(doc["meta"]["plan"]["master_seed"], 42);

    // same rows from the library, whatever the worker count
    let table = run_plan(&ExperimentPlan::from_toml_str(PLAN, Path::new("plan.toml")).unwrap(), 1).unwrap();
    for (row, json_row) in table.rows.iter().zip(rows) {
        assert_eq!(json_row["evaluations"], row.result.evaluations);
        assert_eq!(json_row["seed"], row.result.seed);
    }
}

#[test]
fn run_prints_csv_to_stdout() {
    let out = moea()
        .args([
            "run",
            "--algorithm",
            "spea2",
            "--problem",
            "lotz",
            "--m",
            "2",
            "--n",
            "6",
            "--trials",
            "2",
        ])
        .args(["--mu", "4", "--archive", "7", "--density-k", "1", "--seed", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("spea2,lotz,2,6,,4,7,bitwise,1,"));
}

#[test]
fn invalid_arguments_exit_2() {
    let bad_n = moea()
        .args([
            "run",
            "--algorithm",
            "spea2",
            "--problem",
            "omm",
            "--m",
            "4",
            "--n",
            "7",
        ])
        .output()
        .unwrap();
    assert_eq!(bad_n.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_n.stderr).contains("n"));

    let unknown = moea().args(["run", "--algorithm", "nsga2"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));

    let missing = moea().args(["sweep", "--plan", "/no/such/plan.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/no/such/plan.toml"));

    let bad_workers = moea()
        .env("MOEA_WORKERS", "0")
        .args([
            "run",
            "--algorithm",
            "gsemo",
            "--problem",
            "omm",
            "--m",
            "2",
            "--n",
            "4",
        ])
        .output()
        .unwrap();
    assert_eq!(bad_workers.status.code(), Some(2));
}

#[test]
fn invalid_cell_is_named_before_any_run() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.toml");
    std::fs::write(&plan, PLAN.replace("k = 2", "k = 9")).unwrap();
    let out = moea().args(["sweep", "--plan"]).arg(&plan).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cell 2"));
    assert!(out.stdout.is_empty());
}

#[test]
fn front_and_verify() {
    let out = moea()
        .args(["front", "--problem", "lotz", "--m", "4", "--n", "4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.ends_with("size: 9\n"));

    let out = moea().arg("verify").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn bundled_plans_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../plans");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let plan = ExperimentPlan::from_path(&path).unwrap();
            assert!(!plan.validate().unwrap().is_empty(), "{}", path.display());
            seen += 1;
        }
    }
    assert!(seen >= 2);
    let smoke = ExperimentPlan::from_path(&dir.join("smoke.toml")).unwrap();
    let table = run_plan(&smoke, 2).unwrap();
    assert_eq!(table.rows.len(), 25);
}
