use std::path::Path;
use std::process::{Command, Output};

use stackmc::harness::{emit, preset, ExperimentConfig, PRESET_NAMES};

fn stackmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stackmc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let mut cfg = preset("fig6").unwrap();
    cfg.n_grid = vec![40, 60];
    cfg.trials = 6;
    cfg.output.dir = dir.join("unused");
    let path = dir.join("small.toml");
    std::fs::write(&path, cfg.to_toml_string().unwrap()).unwrap();
    path
}

#[test]
fn list_presets_names_all_six() {
    let out = stackmc(&["list-presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in PRESET_NAMES {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn print_config_round_trips() {
    let out = stackmc(&["preset", "fig2", "--print-config"]);
    assert!(out.status.success());
    let cfg = ExperimentConfig::from_toml_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg, preset("fig2").unwrap());

    let out = stackmc(&["preset", "fig1", "--print-config", "--trials", "7", "--n-grid", "4,8"]);
    let cfg = ExperimentConfig::from_toml_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg.trials, 7);
    assert_eq!(cfg.n_grid, [4, 8]);
}

#[test]
fn unknown_preset_is_a_config_error() {
    let out = stackmc(&["preset", "fig9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("fig1") && err.contains("fig6"), "{err}");
}

#[test]
fn invalid_config_lists_every_problem() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("fig2").unwrap();
    cfg.n_grid = vec![3, 40];
    cfg.trials = 0;
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, cfg.to_toml_string().unwrap()).unwrap();
    let out = stackmc(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("n_grid") && err.contains("trials"), "{err}");
}

#[test]
fn missing_or_malformed_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = stackmc(&["run", "--config", dir.path().join("nope.toml").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let path = dir.path().join("junk.toml");
    std::fs::write(&path, "name = [unterminated").unwrap();
    let out = stackmc(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_outputs_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let mut csv = Vec::new();
    for threads in ["1", "3"] {
        let out_dir = dir.path().join(format!("t{threads}"));
        let out = stackmc(&[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--threads",
            threads,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        for ext in ["csv", "json", "svg"] {
            assert!(out_dir.join(format!("fig6.{ext}")).exists());
        }
        csv.push(std::fs::read_to_string(out_dir.join("fig6.csv")).unwrap());
    }
    assert_eq!(csv[0], csv[1]);
    assert_eq!(csv[0].lines().next(), Some("n,estimator,mse,stderr,trials"));
    let rows = emit::parse_csv(&csv[0]).unwrap();
    assert_eq!(rows.len(), 2 * 3);
    assert!(rows.iter().all(|r| r.trials == 6 && r.mse >= 0.0 && r.stderr >= 0.0));
}

#[test]
fn seed_override_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let mut csv = Vec::new();
    for seed in ["1", "2"] {
        let out_dir = dir.path().join(format!("s{seed}"));
        let out = stackmc(&["run", "--config", cfg.to_str().unwrap(), "--seed", seed, "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success());
        csv.push(std::fs::read_to_string(out_dir.join("fig6.csv")).unwrap());
    }
    assert_ne!(csv[0], csv[1]);
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = stackmc(&["run", "--config", cfg.to_str().unwrap(), "--out", blocker.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn single_trial_warns_about_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out_dir = dir.path().join("one");
    let out = stackmc(&["run", "--config", cfg.to_str().unwrap(), "--trials", "1", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("stderr is reported as 0"));
    let rows = emit::parse_csv(&std::fs::read_to_string(out_dir.join("fig6.csv")).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r.stderr == 0.0));
}
