use std::path::Path;
use std::process::{Command, Output};

fn wgflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wgflow")).args(args).output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn solve_writes_outputs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let files = ["trajectory.csv", "energy.csv", "diagnostics.json"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = wgflow(&["solve", "--K", "30", "--tau", "0.01", "--T", "0.05", "--out", &out_arg(&a)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        runs.push(files.map(|f| std::fs::read(a.join(f)).unwrap()));
    }
    for (f, (x, y)) in files.iter().zip(runs[0].iter().zip(&runs[1])) {
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f} differs between identical runs");
    }
    let traj = std::fs::read_to_string(a.join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("n,t,k,x_k,u_k\n"));
    // 6 frames × 30 cells
    assert_eq!(traj.lines().count(), 1 + 6 * 30);
    let energy = std::fs::read_to_string(a.join("energy.csv")).unwrap();
    assert!(energy.starts_with("n,t,internal,potential,total,W2_increment\n"));
}

#[test]
fn stationary_run_emits_constant_frames() {
    let dir = tempfile::tempdir().unwrap();
    let o = wgflow(&[
        "solve", "--problem", "porous-medium:m=2+zero", "--datum", "uniform", "--K", "10", "--tau", "0.05", "--T", "0.2",
        "--out", &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let traj = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let rows: Vec<Vec<f64>> =
        traj.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    for r in &rows {
        let k = r[2] as usize;
        assert!((r[3] - (-1.0 + 0.2 * k as f64)).abs() < 1e-12);
        assert!((r[4] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"K": 12, "tau": 0.02, "T": 0.04, "datum": "step"}"#).unwrap();
    let out = dir.path().join("run");
    let o = wgflow(&["solve", "--config", cfg.to_str().unwrap(), "--K", "8", "--out", &out_arg(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let d: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(d["config"]["K"], 8);
    assert_eq!(d["config"]["datum"], "step");
    assert_eq!(d["diagnostics"]["steps"], 2);
}

#[test]
fn config_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    for args in [
        vec!["solve", "--K", "1", "--out", &out],
        vec!["solve", "--tau", "0.1", "--T", "0.01", "--out", &out],
        vec!["solve", "--datum", "no-such-datum", "--out", &out],
        vec!["solve", "--problem", "cosine", "--out", &out],
        vec!["solve", "--no-such-flag"],
    ] {
        let o = wgflow(&args);
        assert_eq!(o.status.code(), Some(3), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn compact_support_without_lift_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = wgflow(&["solve", "--datum", "compact-support", "--K", "20", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn solver_failure_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = wgflow(&["solve", "--K", "20", "--tol", "1e-300", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step 1"));
}

#[test]
fn converge_space_writes_error_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = wgflow(&[
        "converge-space", "--K", "10,20,40,80", "--reference", "160,0.01", "--T", "0.05", "--out", &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let errors = std::fs::read_to_string(dir.path().join("errors.csv")).unwrap();
    assert!(errors.starts_with("param,error_L1\n"));
    assert_eq!(errors.lines().count(), 5);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(report["fit"]["slope"].as_f64().unwrap() < 0.0);
    assert!(dir.path().join("error_vs_time.csv").exists());
}

#[test]
fn stored_reference_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref");
    let o = wgflow(&["solve", "--K", "80", "--T", "0.03", "--out", &out_arg(&reference)]);
    assert!(o.status.success());
    let path = reference.join("trajectory.csv");
    let o = wgflow(&[
        "converge-space", "--K", "10,20,40,80", "--reference", path.to_str().unwrap(), "--T", "0.03", "--out",
        &out_arg(&dir.path().join("cmp")),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(dir.path().join("cmp/errors.csv")).unwrap();
    let last: f64 = rows.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(last < 1e-12, "self comparison gives {last}");
}

#[test]
fn missing_stored_reference_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = wgflow(&["converge-space", "--reference", "/nonexistent/traj.csv", "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn consistency_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = wgflow(&["consistency", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["consistency.json", "consistency_tau.csv", "consistency_delta.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn diagnose_passes_on_small_suite() {
    let dir = tempfile::tempdir().unwrap();
    let o = wgflow(&[
        "diagnose", "--K", "20", "--T", "0.05", "--seed", "3", "--instances", "5", "--pairs", "2", "--max-cells", "12",
        "--out", &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("suite.json").exists());
}
