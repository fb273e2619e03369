use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use infosearch_cli::config::ConfigFile;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infosearch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn two_bsc() -> String {
    fs::read_to_string(configs().join("two_bsc.json")).unwrap()
}

#[test]
fn shipped_configs_round_trip() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ConfigFile::load(&path).unwrap();
        let again = ConfigFile::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
    }
}

#[test]
fn capacity_of_a_symmetric_sensor() {
    let cfg = configs().join("two_bsc.json");
    let out = run(&[
        "capacity",
        "--config",
        cfg.to_str().unwrap(),
        "--sensor",
        "f",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let text = v.to_string();
    assert!(text.contains("0.278071905"), "{text}");
    assert!(text.contains("quasi-symmetric"), "{text}");
}

#[test]
fn unknown_sensor_is_a_config_error() {
    let cfg = configs().join("two_bsc.json");
    let out = run(&[
        "capacity",
        "--config",
        cfg.to_str().unwrap(),
        "--sensor",
        "zz",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plan_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("skewed_prior.json");
    let out = run(&[
        "plan",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let plan: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    assert!(plan.to_string().contains("0.3125"), "{plan}");
}

#[test]
fn verify_passes_on_shipped_configs() {
    for name in ["two_bsc.json", "precision_modes.json"] {
        let cfg = configs().join(name);
        let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", stdout(&out));
    }
}

#[test]
fn simulate_writes_both_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("two_bsc.json");
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--reps",
        "3",
        "--stages",
        "4",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let traj = fs::read_to_string(dir.path().join("trajectories.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 3 * 5);
    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 5);
}

#[test]
fn malformed_configs_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [
        two_bsc().replace("[0.2, 0.8]", "[0.2, 0.7]"),
        two_bsc().replace("\"replications\": 100", "\"replications\": 0"),
        two_bsc().replace("[0.3, 0.7]", "[0.3, 0.5, 0.2]"),
    ] {
        let path = write_config(dir.path(), &bad);
        let out = run(&["verify", "--config", &path]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn starved_solver_exits_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = two_bsc()
        .replace("[0.2, 0.8]", "[0.2, 0.5, 0.3]")
        .replace("[0.8, 0.2]", "[0.6, 0.1, 0.3]")
        .replace(
            "\"schedule\": \"joint\"",
            "\"schedule\": \"joint\", \"tolerances\": {\"capacity_tol\": 1e-15, \"max_iters\": 1}",
        );
    let path = write_config(dir.path(), &text);
    let out = run(&["capacity", "--config", &path, "--sensor", "f"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn unwritable_output_exits_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = configs().join("two_bsc.json");
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        blocker.join("sub").to_str().unwrap(),
        "--reps",
        "1",
        "--stages",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
}
