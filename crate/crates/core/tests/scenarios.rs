use std::path::PathBuf;
use std::process::Command;

use wbfe::runner::{parse_config, serialize_config};

fn scenario_files() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "cfg"))
        .collect();
    files.sort();
    files
}

#[test]
fn every_example_ships() {
    let names: Vec<String> = scenario_files()
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for prefix in [
        "ex3_1_", "ex3_2_", "ex3_3_", "ex3_4_", "ex3_5_", "ex3_6a_", "ex3_6b_", "ex3_6c_", "ex3_7_", "ex3_8a_",
        "ex3_8b_", "ex3_8c_", "ex3_9a_", "ex3_9b_",
    ] {
        assert!(names.iter().any(|n| n.starts_with(prefix)), "missing {prefix}");
    }
}

#[test]
fn shipped_scenarios_round_trip() {
    for path in scenario_files() {
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = parse_config(&serialize_config(&cfg)).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
    }
}

#[test]
fn cli_runs_a_scenario_and_writes_outputs() {
    let out = tempfile::tempdir().unwrap();
    let cfg = scenario_files()
        .into_iter()
        .find(|p| p.to_string_lossy().contains("ex3_1_"))
        .unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_wbfe"))
        .args(["run", cfg.to_str().unwrap(), "--set", "run.t_end=0.5", "--out"])
        .arg(out.path())
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(out.path().join("ex3_1_series.csv").exists());
    assert!(out.path().join("ex3_1_report.txt").exists());
    assert!(out.path().join("ex3_1_snapshot_0000.csv").exists());
}

#[test]
fn cli_rejects_unknown_keys() {
    let cfg = scenario_files().into_iter().next().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_wbfe"))
        .args(["run", cfg.to_str().unwrap(), "--set", "grid.nonsense=1"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}
