use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bellforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = bellforge(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn shipped(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "strategies", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn local_bound_of_chsh_is_two() {
    let o = bellforge(&["bound", "local", "chsh"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("local_bound: 2.00000000"));
    assert_eq!(json(&["bound", "local", "chsh"])["local_bound"], 2.0);
}

#[test]
fn cglmp_values_match_the_table() {
    let table = [
        2.82842718, 2.91485425, 2.97269840, 3.01571048, 3.04970041, 3.07764831, 3.10128058,
    ];
    let o = bellforge(&["reproduce", "cglmp-values", "--dmax", "8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("d,i22dd,cglmp,table,abs_error\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 7);
    for (row, want) in rows.iter().zip(table) {
        assert!((row[2] - want).abs() < 1e-5, "d={} {}", row[0], row[2]);
    }
}

#[test]
fn negativity_column_is_reproduced() {
    let o = bellforge(&["reproduce", "negativity", "--dmax", "5"]);
    let rows = csv_rows(&stdout(&o));
    for (row, want) in rows.iter().zip([0.5, 0.9836, 1.4561, 1.9203]) {
        assert!((row[1] - want).abs() < 5e-4, "{row:?}");
    }
}

#[test]
fn shipped_i_s_strategy_evaluates_to_the_closed_form() {
    let v = json(&["eval", "i_s-2", &shipped("is2.json")]);
    let target = (13.0 + 4.0 * 13f64.sqrt()) / 3.0;
    assert!((v["value"].as_f64().unwrap() - target).abs() < 1e-6, "{v}");
    assert_eq!(v["local_bound"], 9.0);
}

#[test]
fn exported_strategy_round_trips_through_eval() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chsh.json");
    let p = path.to_str().unwrap();
    assert!(bellforge(&["strategy", "export", "chsh-sym", "--out", p]).status.success());
    let v = json(&["eval", "chsh", p]);
    assert!((v["value"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    let r = json(&["check", "symmetry", p]);
    assert_eq!(r["correlation_symmetric"], true);
    assert_eq!(r["sqs"], true);
    let n = json(&["negativity", p]);
    assert!((n["negativity"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn npa_writes_sdpa_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chsh.dat-s");
    let v = json(&["bound", "npa", "chsh", "--level", "1", "--sdpa", path.to_str().unwrap()]);
    assert!((v["upper_bound"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-6);
    assert!(!std::fs::read_to_string(&path).unwrap().is_empty());
}

#[test]
fn quantum_lower_bound_echoes_default_seed_and_is_deterministic() {
    let args = ["bound", "quantum-lower", "chsh", "--restarts", "3"];
    let a = bellforge(&args);
    let b = bellforge(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&args);
    assert!(v["seed"].is_u64());
    assert!((v["lower_bound"].as_f64().unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-7);
}

#[test]
fn sweep_csv_is_byte_identical_for_a_seed() {
    let args = [
        "sweep", "is-alpha", "--from", "2", "--to", "3", "--steps", "2", "--restarts", "2", "--seed", "11",
    ];
    let a = bellforge(&args);
    let b = bellforge(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("seed: 11"));
    let text = stdout(&a);
    assert!(text.starts_with("alpha,local,sqs_qubit,quantum\n"));
    for row in csv_rows(&text) {
        assert_eq!(row[1], 2.0 * row[0] + 5.0);
        assert!(row[2] <= row[1] + 1e-6);
    }
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(bellforge(&["bound"]).status.code(), Some(1));
    assert_eq!(bellforge(&["bound", "local", "no-such"]).status.code(), Some(1));
    assert_eq!(bellforge(&["reproduce", "cglmp-values", "--dmax", "40"]).status.code(), Some(1));
    let o = bellforge(&["eval", "chsh", &shipped("is2.json"), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exit_code"], 1);
}

#[test]
fn thread_cap_must_be_positive() {
    let o = Command::new(env!("CARGO_BIN_EXE_bellforge"))
        .args(["bound", "local", "chsh"])
        .env("BELLFORGE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_bellforge"))
        .args(["bound", "local", "chsh"])
        .env("BELLFORGE_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn help_documents_csv_columns() {
    let o = bellforge(&["sweep", "is-alpha", "--help"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("CSV columns: alpha, local"));
}
