//! End-to-end checks of the gridcon binary: exit codes, report shape, and
//! determinism of seeded runs.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gridcon"))
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gridcon-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn json_of(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is a JSON report")
}

fn write_ieee14(dir: &PathBuf) -> PathBuf {
    let path = dir.join("ieee14.json");
    let out = bin().args(["dataset", "--name", "ieee14"]).output().unwrap();
    assert!(out.status.success());
    std::fs::write(&path, &out.stdout).unwrap();
    path
}

fn strip_volatile(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.retain(|k, _| !k.contains("elapsed") && !k.contains("_ms"));
            for v in map.values_mut() {
                strip_volatile(v);
            }
        }
        serde_json::Value::Array(items) => {
            for v in items {
                strip_volatile(v);
            }
        }
        _ => {}
    }
}

#[test]
fn dataset_ieee118_has_107_substations() {
    let out = bin().args(["dataset", "--name", "ieee118"]).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let substations = doc["annotations"]["substations"].as_object().unwrap();
    assert_eq!(substations.len(), 107);
    assert_eq!(doc["annotations"]["control_centers"], serde_json::json!([16, 61]));
}

#[test]
fn simulate_empty_failure_is_a_quiet_run() {
    let dir = tempdir();
    let net = write_ieee14(&dir);
    let out = bin()
        .args(["simulate", "--network", net.to_str().unwrap(), "--fail", "", "--model", "miim"])
        .output()
        .unwrap();
    let report = json_of(&out);
    assert_eq!(report["results"]["damage"], 0);
    assert_eq!(report["results"]["steps"], 0);
}

#[test]
fn contingency_after_p12_names_p7() {
    let dir = tempdir();
    let net_path = write_ieee14(&dir);
    // Inject the failed state through the network file, keeping the
    // dataset itself pristine.
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&net_path).unwrap()).unwrap();
    doc["initial_states"]["P12"] = serde_json::json!(0);
    let failed_path = dir.join("ieee14-p12.json");
    std::fs::write(&failed_path, serde_json::to_string(&doc).unwrap()).unwrap();

    let out = bin()
        .args([
            "contingency",
            "--network",
            failed_path.to_str().unwrap(),
            "-k",
            "1",
            "--solver",
            "heuristic",
            "--metric",
            "failed-count",
        ])
        .output()
        .unwrap();
    let report = json_of(&out);
    assert_eq!(report["results"]["sets"], serde_json::json!([["P7"]]));
}

#[test]
fn export_ilp_writes_model() {
    let dir = tempdir();
    let net = write_ieee14(&dir);
    let model = dir.join("model.lp");
    let out = bin()
        .args([
            "export-ilp",
            "--network",
            net.to_str().unwrap(),
            "-k",
            "1",
            "--out",
            model.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    let report = json_of(&out);
    assert!(report["bytes"].as_u64().unwrap() > 0);
    let lp = std::fs::read_to_string(&model).unwrap();
    assert!(lp.starts_with("\\"));
    assert!(lp.contains("Minimize"));
    assert!(lp.contains("Binaries"));
}

#[test]
fn seeded_game_reports_are_identical() {
    let dir = tempdir();
    let net = write_ieee14(&dir);
    let scenario = dir.join("scenario.json");
    std::fs::write(
        &scenario,
        serde_json::json!({
            "game_type": 3,
            "k": 2,
            "l": 1,
            "seed": 11,
            "solver": "heuristic",
            "metric": "failed-count",
            "hardening_mode": "clamp"
        })
        .to_string(),
    )
    .unwrap();
    let run = || {
        let out = bin()
            .args([
                "game",
                "--scenario",
                scenario.to_str().unwrap(),
                "--network",
                net.to_str().unwrap(),
                "--csv",
            ])
            .output()
            .unwrap();
        let mut report = json_of(&out);
        strip_volatile(&mut report);
        report
    };
    let a = run();
    let b = run();
    assert_eq!(a, b, "seeded game reports must be bit-identical modulo timings");
    assert!(a["results"]["operational_csv"]
        .as_str()
        .unwrap()
        .starts_with("before,after_hardened,after_unhardened"));
    let dh = a["results"]["damage_hardened"].as_u64().unwrap();
    let du = a["results"]["damage_unhardened"].as_u64().unwrap();
    assert!(dh <= du);
}

#[test]
fn events_run_reports_budget() {
    let dir = tempdir();
    let net = write_ieee14(&dir);
    let events = dir.join("events.csv");
    std::fs::write(&events, "time_ms,entity,new_state\n0,P12,0\n").unwrap();
    let out = bin()
        .args([
            "events",
            "--network",
            net.to_str().unwrap(),
            "--events",
            events.to_str().unwrap(),
            "-k",
            "1",
            "--metric",
            "failed-count",
            "--horizon-ms",
            "5",
            "--budget-ms",
            "33",
        ])
        .output()
        .unwrap();
    let report = json_of(&out);
    let rows = report["results"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows[1..] {
        assert_eq!(row["list"], serde_json::json!(["P7", "C1_1_6_6", "C1_2_6_6"]));
    }
    assert!(report["budget_violations"].as_array().is_some());
}

#[test]
fn usage_error_exits_two() {
    let out = bin().args(["contingency", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_error_exits_one() {
    let dir = tempdir();
    let net = write_ieee14(&dir);
    let out = bin()
        .args(["simulate", "--network", net.to_str().unwrap(), "--fail", "P999"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
