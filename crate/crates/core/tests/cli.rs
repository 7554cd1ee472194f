use std::path::Path;
use std::process::{Command, Output};

use rydtrap::cli::{Provenance, ResultEnvelope};

fn rydtrap(args: &[&str]) -> Output {
    rydtrap_with_env(args, &[])
}

fn rydtrap_with_env(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rydtrap"));
    cmd.args(args).env_remove("RYDTRAP_CACHE_DIR");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn angular_table_matches_library() {
    let o = rydtrap(&["angular-table"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), rydtrap::angular::angular_table_csv());
}

#[test]
fn usage_errors_exit_one() {
    let o = rydtrap(&["trap-depth", "--waist", "650", "--n", "75"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing a unit"), "{}", stderr(&o));

    let o = rydtrap(&["trap-depth", "--series", "3X1"]);
    assert_eq!(o.status.code(), Some(1));

    let o = rydtrap(&["trap-depth", "--power", "9 furlongs"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown unit"));

    assert_eq!(rydtrap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rydtrap(&["--help"]).status.code(), Some(0));
}

#[test]
fn valid_trap_depth_config() {
    let o = rydtrap(&["trap-depth", "--waist", "650nm", "--wavelength", "532nm", "--power", "9mW", "--series", "3S1", "--n", "75"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("n,n_star,u_core_mhz"));
    assert!(lines.next().unwrap().starts_with("75,"));
    assert!(lines.next().is_none());
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "").unwrap();
    let o = rydtrap(&["pi-fit", "--input", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let missing = dir.path().join("nope.csv");
    assert_eq!(rydtrap(&["ritz-fit", "--input", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn failed_oracle_check_exits_three() {
    let o = rydtrap(&["oracle-check", "--series", "3S1", "--n", "40", "--tolerance", "1e-15"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("false"));
}

#[test]
fn ritz_fit_envelope_round_trips() {
    let o = rydtrap(&["ritz-fit", "--range", "36:79", "--order", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let env: ResultEnvelope = serde_json::from_str(&text).unwrap();
    assert_eq!(env.command, "ritz-fit");
    assert_eq!(env.provenance, Provenance::current());
    let delta0 = env.data["coefficients"][0]["value"].as_f64().unwrap();
    assert!((delta0 - 4.4382).abs() < 1e-3);
    let again = serde_json::to_value(&env).unwrap();
    assert_eq!(again, serde_json::from_str::<serde_json::Value>(&text).unwrap());
    // Identical configuration, identical bytes.
    assert_eq!(stdout(&rydtrap(&["ritz-fit", "--range", "36:79", "--order", "8"])), text);
}

#[test]
fn output_flag_writes_only_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("forster.json");
    let o = rydtrap(&["--output", path.to_str().unwrap(), "forster", "--delta", "3S1=4.439"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let env: ResultEnvelope = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let defect = env.data["defect_mhz"].as_f64().unwrap();
    assert!(defect < 0.0 && defect > -400.0, "{defect}");
}

#[test]
fn seeded_simulation_is_reproducible() {
    let args = ["ramsey-sim", "--dnu", "90kHz", "--temp", "13uK", "--depth", "1.4MHz", "--t1", "108us", "--n", "5000", "--seed", "3"];
    let a = rydtrap(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, rydtrap(&args).stdout);
    let other = rydtrap(&["ramsey-sim", "--dnu", "90kHz", "--temp", "13uK", "--depth", "1.4MHz", "--t1", "108us", "--n", "5000", "--seed", "4"]);
    assert_ne!(a.stdout, other.stdout);
    assert!(stdout(&a).starts_with("t_us,contrast\n0,1\n"));
}

#[test]
fn tensor_field_cache_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let env = [("RYDTRAP_CACHE_DIR", dir.path())];
    let args = ["trap-depth", "--n-min", "70", "--n-max", "72"];
    let cold = rydtrap_with_env(&args, &env);
    assert_eq!(cold.status.code(), Some(0));
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(entries.len(), 1, "{entries:?}");
    assert!(entries[0].to_str().unwrap().starts_with("field-"));
    let warm = rydtrap_with_env(&args, &env);
    assert_eq!(warm.stdout, cold.stdout);
    assert_eq!(rydtrap(&args).stdout, cold.stdout);

    // A different beam gets its own entry.
    rydtrap_with_env(&["trap-depth", "--n", "70", "--waist", "700nm"], &env);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn execute_matches_binary_json() {
    use clap::Parser;
    let cli = rydtrap::cli::Cli::try_parse_from(["rydtrap", "autoion", "--n", "75"]).unwrap();
    let env = rydtrap::cli::execute(&cli.command).unwrap();
    let o = rydtrap(&["autoion", "--n", "75"]);
    let from_bin: ResultEnvelope = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(env, from_bin);
    let lifetime = env.data["lifetime_ms"].as_f64().unwrap();
    assert!((lifetime - 6.42).abs() < 0.01, "{lifetime}");
}
