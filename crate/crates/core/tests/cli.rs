use std::path::Path;
use std::process::{Command, Output};

use softdress::cli_io::ResultTable;

const BASE: &str = "[particles]\nv1 = [0.0, 0.0, 0.6]\nv2 = [0.0, 0.0, -0.6]\n";

fn softdress(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_softdress"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .output()
        .unwrap()
}

#[test]
fn every_subcommand_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    for sub in ["kin", "phase", "soft", "scan", "cancel", "cloud", "fock", "entangle"] {
        let out = softdress(dir.path(), BASE, &[sub]);
        assert!(out.status.success(), "{sub}: {}", String::from_utf8_lossy(&out.stderr));
        let table = ResultTable::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
        assert_eq!(table.meta.subcommand, sub);
        assert!(!table.rows.is_empty(), "{sub} produced no rows");
    }
}

#[test]
fn json_output_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("scan.json");
    let out = softdress(
        dir.path(),
        BASE,
        &["scan", "--format", "json", "--out", target.to_str().unwrap()],
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["columns"][0], "lambda");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn lambda_override_replaces_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = softdress(dir.path(), BASE, &["scan", "--lambda", "0.5,0.25"]);
    let table = ResultTable::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(table.column("lambda").unwrap(), vec![0.5, 0.25]);
}

#[test]
fn offshell_breaks_cancellation() {
    let dir = tempfile::tempdir().unwrap();
    let out = softdress(dir.path(), BASE, &["cancel", "--offshell", "0.05"]);
    assert!(out.status.success());
    let table = ResultTable::from_csv(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let cf = table.column("c_F").unwrap();
    assert_eq!(cf.len(), 2);
    assert!(cf[0].abs() < 1e-10);
    assert!(cf[1].abs() > 1e-4);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("[particles\nv1 = [0.0, 0.0, 0.6]\n", "syntax"),
        (
            "[particles]\nv1 = [0.0, 0.0, 0.6]\nv2 = [0.0, 0.0, -0.6]\nspin = 1\n",
            "unknown",
        ),
        ("[particles]\nv1 = \"fast\"\nv2 = [0.0, 0.0, -0.6]\n", "type"),
        ("[particles]\nv1 = [0.0, 0.0, 1.2]\nv2 = [0.0, 0.0, -0.6]\n", "bound"),
    ];
    for (text, kind) in cases {
        let out = softdress(dir.path(), text, &["kin"]);
        assert_eq!(out.status.code(), Some(2), "{kind}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(kind), "{kind}: {err}");
    }
    let out = softdress(dir.path(), BASE, &["scan", "--lambda", "2.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn truncation_leakage_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{BASE}[fock]\nalphas = [[3.0, 0.0]]\nn_max = 6\n");
    let out = softdress(dir.path(), &text, &["fock"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_config_exits_4() {
    let out = Command::new(env!("CARGO_BIN_EXE_softdress"))
        .args(["kin", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
