use std::path::Path;
use std::process::{Command, Output};

use eporing::poly::{PolyJson, RatPoly};

fn run(args: &[&str]) -> Output {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_eporing"));
    c.args(args);
    for k in ["EPORING_FORMAT", "EPORING_CACHE_DIR", "EPORING_WORKERS", "EPORING_BUDGET"] {
        c.env_remove(k);
    }
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

#[test]
fn group_orders_and_cosets() {
    let o = run(&["group", "order", "--group", "G8"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1536");
    let o = run(&["group", "cosets", "--group", "G"]);
    let s = stdout(&o);
    assert!(s.contains("|K| = 8") && s.contains("kappa = 48"), "{s}");
}

#[test]
fn identity_generator_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.json");
    let one = vec!["1".to_string()];
    let zero = vec!["0".to_string()];
    let rows: Vec<Vec<Vec<String>>> = (0..2)
        .map(|i| (0..2).map(|j| if i == j { one.clone() } else { zero.clone() }).collect())
        .collect();
    let js = serde_json::json!([{ "order": 1, "rows": rows }]);
    std::fs::write(&path, js.to_string()).unwrap();
    let o = run(&["group", "order", "--file", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn epoly_and_code_examples() {
    assert_eq!(stdout(&run(&["epoly", "compute", "4", "--group", "G"])).trim(), "0");
    assert_eq!(stdout(&run(&["code", "cwe", "--builtin", "zero8"])).trim(), "t0^8");
    let o8 = stdout(&run(&["code", "cwe", "--builtin", "o8"]));
    assert_eq!(o8.trim(), eporing::codes::cwe_fixture("o8").unwrap().to_string());
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/codes/q24a.txt");
    let s = stdout(&run(&["code", "check", "--file", file.to_str().unwrap()]));
    assert!(s.contains("Type II: true") && s.contains("|C| = 2^24"), "{s}");
}

#[test]
fn polynomial_json_round_trips() {
    let o = run(&["epoly", "compute", "8", "--group", "G8", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let pj: PolyJson = serde_json::from_value(v["result"]["poly"].clone()).unwrap();
    let p = RatPoly::from_json(&pj).unwrap();
    assert_eq!(p.homogeneous_degree(), Some(8));
    assert_eq!(p.to_json(), pj);
}

#[test]
fn flags_override_environment() {
    let o = run_env(&["group", "order", "--group", "G"], &[("EPORING_FORMAT", "json")]);
    assert!(stdout(&o).trim_start().starts_with('{'));
    let o = run_env(&["group", "order", "--group", "G", "--format", "text"], &[("EPORING_FORMAT", "json")]);
    assert_eq!(stdout(&o).trim(), "384");
}

#[test]
fn cache_hit_and_miss_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["verify-tables", "5", "6", "--cache-dir", d, "--format", "json"];
    let miss = run(&args);
    assert!(miss.status.success());
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
    let hit = run(&args);
    assert_eq!(miss.stdout, hit.stdout);
    let none = run(&["verify-tables", "5", "6", "--format", "json"]);
    assert_eq!(miss.stdout, none.stdout);
}

#[test]
fn verify_tables_exit_status() {
    let o = run(&["verify-tables", "5"]);
    assert!(o.status.success());
    let o = run(&["verify-tables", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("MISMATCH"));
}

#[test]
fn errors_are_reported() {
    let o = run(&["group", "order", "--group", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("G8"));
    let o = run(&["code", "cwe", "--builtin", "g24", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("16777216"));
}
