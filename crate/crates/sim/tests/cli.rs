use std::process::Command;

use docket_sim::SimulationMetrics;

fn sim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_docket-sim"))
}

#[test]
fn writes_metrics_and_assignments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("metrics.json");
    let result = sim()
        .args([
            "--cases", "300", "--days", "40", "--seed", "3", "--format", "json", "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );

    let file: SimulationMetrics =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let printed: SimulationMetrics = serde_json::from_slice(&result.stdout).unwrap();
    assert_eq!(file, printed);
    assert_eq!((file.seed, file.days, file.generated_cases), (3, 40, 300));

    let lines = std::fs::read_to_string(dir.path().join("assignments.ndjson")).unwrap();
    assert!(lines.lines().count() > 0);
    for line in lines.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["case_id"].is_string() && v["date"].is_string());
    }
    assert!(String::from_utf8_lossy(&result.stderr).contains("simulated 40 days"));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sim.toml");
    std::fs::write(
        &config,
        "n_cases = 50\nseed = 9\ndays = 10\nholidays = [2025-01-06]\n",
    )
    .unwrap();
    let result = sim()
        .arg("--config")
        .arg(&config)
        .args(["--days", "5", "--format", "json"])
        .output()
        .unwrap();
    assert!(result.status.success());
    let m: SimulationMetrics = serde_json::from_slice(&result.stdout).unwrap();
    assert_eq!((m.seed, m.days, m.generated_cases), (9, 5, 50));
}

#[test]
fn bad_config_fails_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sim.toml");
    std::fs::write(&config, "type_mix = [0.9, 0.9, 0.9]\n").unwrap();
    let result = sim().arg("--config").arg(&config).output().unwrap();
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("type_mix"));

    let result = sim()
        .args(["--config", "/nonexistent/sim.toml"])
        .output()
        .unwrap();
    assert_eq!(result.status.code(), Some(1));
}
