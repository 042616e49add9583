//! End-to-end checks of the `gatesim` binary: subcommand plumbing, file
//! formats, exit codes, and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gatesim"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn fast_gate_config(dir: &Path) -> PathBuf {
    write_config(
        dir,
        "gate.json",
        r#"{"F_prop": 9.0, "Rm": 10.0, "max_steps": 2000}"#,
    )
}

fn fast_lattice_config(dir: &Path) -> PathBuf {
    write_config(
        dir,
        "lattice.json",
        r#"{"F_prop": 5.0, "Rm": 30.0, "D": 0.06, "max_steps": 400}"#,
    )
}

fn run_ok(cmd: &mut Command) -> Output {
    let output = cmd.output().expect("spawn gatesim");
    assert!(
        output.status.success(),
        "command failed ({:?}):\nstdout: {}\nstderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

#[test]
fn gate_run_writes_trajectory_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = fast_gate_config(dir.path());
    let out = dir.path().join("traj.jsonl");
    let output = run_ok(
        bin()
            .args(["gate-run", "--seed", "7", "--decimate", "5"])
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out),
    );
    assert!(String::from_utf8_lossy(&output.stdout).contains("outcome: Traversed"));
    let text = std::fs::read_to_string(&out).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.contains("\"t\":0.0"), "first record: {first}");
    assert!(first.contains("\"mode1\":\"free\""));
    // Manifest sits next to the first output and lists it.
    let manifest = std::fs::read_to_string(dir.path().join("traj.jsonl.manifest.json")).unwrap();
    assert!(manifest.contains("\"subcommand\": \"gate-run\""));
    assert!(manifest.contains("traj.jsonl"));
    assert!(manifest.contains("\"master_seed\": 7"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = fast_gate_config(dir.path());
    let out_a = dir.path().join("a.jsonl");
    let out_b = dir.path().join("b.jsonl");
    for out in [&out_a, &out_b] {
        run_ok(
            bin()
                .args(["gate-run", "--seed", "123"])
                .arg("--config")
                .arg(&config)
                .arg("--out")
                .arg(out),
        );
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn exit_codes_follow_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    // Invalid config value -> 2.
    let bad = write_config(dir.path(), "bad.json", r#"{"M": -1}"#);
    let out = dir.path().join("x.jsonl");
    let output = bin()
        .args(["gate-run", "--seed", "1"])
        .arg("--config")
        .arg(&bad)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("mass"));

    // Unreadable config path -> 4.
    let output = bin()
        .args(["gate-run", "--seed", "1", "--config", "/nonexistent/c.json"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));

    // Config missing the required propulsive force -> 2.
    let empty = write_config(dir.path(), "empty.json", "{}");
    let output = bin()
        .args(["gate-run", "--seed", "1"])
        .arg("--config")
        .arg(&empty)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("F_prop"));
}

#[test]
fn sweep_emits_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "sweep.json",
        r#"{"Rm": 0.0, "max_steps": 1500}"#,
    );
    let out = dir.path().join("cells.csv");
    run_ok(
        bin()
            .args([
                "gate-sweep",
                "--seed",
                "42",
                "--trials",
                "3",
                "--f-prop",
                "6,9",
                "--rm",
                "0,10",
            ])
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out),
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 4);
    assert!(lines[0].starts_with("f_prop,rm,k_l,k_r,trials,"));
    assert!(lines[1].starts_with("6,0,400,400,3,"));
    assert!(lines[4].starts_with("9,10,400,400,3,"));
}

#[test]
fn landscape_grid_and_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let config = fast_gate_config(dir.path());
    let traj = dir.path().join("traj.jsonl");
    run_ok(
        bin()
            .args(["gate-run", "--seed", "3", "--decimate", "20"])
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&traj),
    );
    let grid = dir.path().join("grid.csv");
    let overlay = dir.path().join("overlay.csv");
    run_ok(
        bin()
            .arg("landscape")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&grid)
            .arg("--overlay")
            .arg(&traj)
            .arg("--overlay-out")
            .arg(&overlay),
    );
    let grid_text = std::fs::read_to_string(&grid).unwrap();
    assert_eq!(grid_text.lines().count(), 1 + 101 * 121);
    assert!(grid_text.starts_with("x,y,e_left,e_right,e_prop,e_total"));
    let overlay_text = std::fs::read_to_string(&overlay).unwrap();
    assert!(overlay_text.starts_with("t,x,y,e_full,e_active"));
    assert!(overlay_text.lines().count() > 10);
}

#[test]
fn markov_pipeline_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let config = fast_lattice_config(dir.path());
    let matrix = dir.path().join("matrix.json");
    run_ok(
        bin()
            .args(["markov-estimate", "--seed", "5", "--trials-per-state", "2"])
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&matrix),
    );
    let predicted = dir.path().join("mcmc.csv");
    run_ok(
        bin()
            .args(["markov-predict", "--seed", "6", "--trials", "50"])
            .arg("--matrix")
            .arg(&matrix)
            .arg("--out")
            .arg(&predicted),
    );
    let dynamic = dir.path().join("dyn.csv");
    run_ok(
        bin()
            .args(["lattice-run", "--seed", "7", "--trials", "20"])
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&dynamic),
    );
    let report = dir.path().join("report.json");
    let output = run_ok(
        bin()
            .arg("compare")
            .arg("--a")
            .arg(&predicted)
            .arg("--b")
            .arg(&dynamic)
            .arg("--out")
            .arg(&report),
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("corrcoef:"), "{stdout}");
    assert!(stdout.contains("rmse:"));
    let report_text = std::fs::read_to_string(&report).unwrap();
    assert!(report_text.contains("\"total_a\": 50"));
    assert!(report_text.contains("\"total_b\": 20"));
}

#[test]
fn lattice_trajectory_carries_gate_indices() {
    let dir = tempfile::tempdir().unwrap();
    let config = fast_lattice_config(dir.path());
    let hist = dir.path().join("hist.csv");
    let traj = dir.path().join("lattice.jsonl");
    run_ok(
        bin()
            .args(["lattice-run", "--seed", "1", "--trials", "1"])
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&hist)
            .arg("--traj-out")
            .arg(&traj),
    );
    let text = std::fs::read_to_string(&traj).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.contains("\"ix\":0"), "{first}");
    assert!(first.contains("\"iy\":0"));
    let hist_text = std::fs::read_to_string(&hist).unwrap();
    assert!(hist_text.starts_with("iy\\ix,-4,-3,-2,-1,0,1,2,3,4"));
}

#[test]
fn output_dir_env_prefixes_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    let config = fast_gate_config(dir.path());
    run_ok(
        bin()
            .env("GATESIM_OUT_DIR", dir.path())
            .args(["gate-run", "--seed", "2", "--decimate", "50"])
            .arg("--config")
            .arg(&config)
            .args(["--out", "nested/traj.jsonl"]),
    );
    assert!(dir.path().join("nested/traj.jsonl").exists());
    assert!(dir.path().join("nested/traj.jsonl.manifest.json").exists());
}
