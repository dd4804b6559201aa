use std::path::Path;
use std::process::{Command, Output};

use memesim::GridConfig;

const BIN: &str = env!("CARGO_BIN_EXE_memesim");
const MOCK: &str = env!("CARGO_BIN_EXE_memesim-mock-env");

fn memesim(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(["--workers", "2"])
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = memesim(args);
    assert!(
        out.status.success(),
        "memesim {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let stdout = ok(&["run", "--dims", "8x8", "--steps", "25", "--seed", "3", "--out", s(&out), "--progress", "0"]);
    assert!(stdout.contains(" & "), "{stdout}");
    for f in ["stats.csv", "registry.jsonl", "raster.pgm", "events.csv", "summary.json", "config.toml"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let stats = read(&out.join("stats.csv"));
    let mut lines = stats.lines();
    assert_eq!(lines.next().unwrap(), "step,max_pop,n_above_40,n_above_8,coverage,distinct");
    assert_eq!(lines.count(), 25);
    let summary: serde_json::Value = serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert_eq!(summary["steps"], 25);
    assert!(summary["table_row"].as_str().unwrap().contains(" & "));
    let pgm = std::fs::read(out.join("raster.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n"));
    let config = GridConfig::load(&out.join("config.toml")).unwrap();
    assert_eq!((config.rows, config.cols, config.seed), (8, 8, 3));
}

#[test]
fn unknown_preset_lists_choices() {
    let out = memesim(&["run", "--preset", "bogus", "--dims", "8x8", "--steps", "2", "--out", "/nonexistent/x"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bogus") && err.contains("no_selection_het"), "{err}");
}

#[test]
fn zero_steps_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = memesim(&["run", "--dims", "8x8", "--steps", "0", "--out", s(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("steps"));
    assert!(!dir.path().join("stats.csv").exists());
}

#[test]
fn resume_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let whole = dir.path().join("whole");
    let split = dir.path().join("split");
    let common = ["--dims", "8x8", "--seed", "5", "--progress", "0"];
    let mut a = vec!["run", "--steps", "40", "--out", s(&whole)];
    a.extend(common);
    ok(&a);
    let mut b = vec!["run", "--steps", "20", "--final-checkpoint", "--out", s(&split)];
    b.extend(common);
    ok(&b);
    ok(&["resume", "--checkpoint", s(&split.join("checkpoint.bin")), "--steps", "40", "--progress", "0"]);
    assert_eq!(read(&whole.join("stats.csv")), read(&split.join("stats.csv")));
    assert_eq!(read(&whole.join("events.csv")), read(&split.join("events.csv")));
    assert_eq!(read(&whole.join("registry.jsonl")), read(&split.join("registry.jsonl")));
}

#[test]
fn resume_refuses_other_config() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["run", "--dims", "8x8", "--steps", "5", "--final-checkpoint", "--out", s(dir.path()), "--progress", "0"]);
    let other = dir.path().join("other.toml");
    let mut c = GridConfig::load(&dir.path().join("config.toml")).unwrap();
    c.noise_std = 0.3;
    std::fs::write(&other, c.to_toml_string()).unwrap();
    let out = memesim(&[
        "resume",
        "--checkpoint",
        s(&dir.path().join("checkpoint.bin")),
        "--config",
        s(&other),
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&c.hash()), "{err}");
    let stored = GridConfig::load(&dir.path().join("config.toml")).unwrap().hash();
    assert!(err.contains(&stored), "{err}");
}

#[test]
fn replay_reproduces_stats() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let rep = dir.path().join("replay");
    ok(&["run", "--dims", "8x8", "--steps", "30", "--log-messages", "--out", s(&run), "--progress", "0"]);
    let stdout = ok(&["replay", "--log", s(&run.join("messages.log")), "--out", s(&rep)]);
    assert!(stdout.contains("steps 30"), "{stdout}");
    assert_eq!(read(&run.join("stats.csv")), read(&rep.join("stats.csv")));
    assert_eq!(read(&run.join("registry.jsonl")), read(&rep.join("registry.jsonl")));
    assert_eq!(std::fs::read(run.join("raster.pgm")).unwrap(), std::fs::read(rep.join("raster.pgm")).unwrap());
}

#[test]
fn sweep_has_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("base.toml");
    let c = GridConfig {
        rollout_steps: 5,
        ..GridConfig::default()
    };
    std::fs::write(&cfg, c.to_toml_string()).unwrap();
    let csv = dir.path().join("sweep.csv");
    ok(&[
        "sweep", "--gamma-s", "0,1", "--gamma-f", "0,0.5,1", "--seeds", "1", "--config", s(&cfg), "--dims", "6x6",
        "--steps", "4", "--out", s(&csv),
    ]);
    let rows = memesim::harness::read_sweep_csv(&csv).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.mean_final_fitness.is_finite()));
}

fn task_config(dir: &Path, mock_args: &[&str]) -> std::path::PathBuf {
    let mut command = vec![MOCK.to_owned()];
    command.extend(mock_args.iter().map(|a| a.to_string()));
    let c = GridConfig {
        rows: 6,
        cols: 6,
        steps: 3,
        task_on: true,
        rollout_steps: 5,
        environment_command: command,
        environment_timeout_ms: 5000,
        ..GridConfig::default()
    };
    let path = dir.join("task.toml");
    std::fs::write(&path, c.to_toml_string()).unwrap();
    path
}

#[test]
fn external_env_constant_metric_gives_fitness_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = task_config(dir.path(), &["--obs", "0.5", "--metric", "1.0"]);
    let out = dir.path().join("out");
    let stdout = ok(&["run", "--config", s(&cfg), "--out", s(&out), "--progress", "0"]);
    assert!(stdout.contains("final fitness 1.000000"), "{stdout}");
    let mut r = csv::Reader::from_path(out.join("fitness.csv")).unwrap();
    let rows: Vec<memesim::harness::FitnessRow> = r.deserialize().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!((row.mean, row.best, row.completed, row.faults), (1.0, 1.0, 36, 0));
    }
}

#[test]
fn external_env_exiting_mid_episode_is_isolated() {
    let dir = tempfile::tempdir().unwrap();
    // Each child serves one full 5-step rollout, then dies two steps into the next.
    let cfg = task_config(dir.path(), &["--exit-after", "7"]);
    let out = dir.path().join("out");
    ok(&["run", "--config", s(&cfg), "--out", s(&out), "--progress", "0"]);
    let mut r = csv::Reader::from_path(out.join("fitness.csv")).unwrap();
    let rows: Vec<memesim::harness::FitnessRow> = r.deserialize().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    let faults: u32 = rows.iter().map(|r| r.faults).sum();
    let completed: u32 = rows.iter().map(|r| r.completed).sum();
    assert!(faults > 0 && completed > 0, "faults {faults}, completed {completed}");
    assert_eq!(faults + completed, 3 * 36);
    assert!(read(&out.join("faults.log")).lines().count() as u32 == faults);
}

#[test]
fn external_env_always_failing_checkpoints_and_aborts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = task_config(dir.path(), &["--garbage"]);
    let out = dir.path().join("out");
    let res = memesim(&["run", "--config", s(&cfg), "--out", s(&out), "--progress", "0"]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("every rollout failed"));
    let ck = memesim::harness::Checkpoint::load(&out.join("checkpoint.bin"), None).unwrap();
    assert_eq!(ck.next_step, 1);
}
