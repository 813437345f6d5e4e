use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lhz-cd"));
    c.env_remove("LHZ_CD_OUTPUT_DIR");
    c
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn error_json(out: &Output) -> serde_json::Value {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().rev().find(|l| l.starts_with('{')).expect("error JSON on stderr");
    serde_json::from_str(line).unwrap()
}

#[test]
fn version_and_help() {
    let out = bin().arg("--version").output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), format!("lhz-cd {}", lhz_cd::VERSION));
    let out = bin().arg("--help").output().unwrap();
    let help = String::from_utf8_lossy(&out.stdout);
    assert!(help.contains("Exit codes"));
    for c in ["sweep", "scan-lambda", "spectrum", "ensemble"] {
        assert!(help.contains(c));
    }
}

#[test]
fn cd_sweep_writes_series_with_y_columns() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sweep", "--protocol", "cd", "--lambda-f", "1.04", "--tau", "1.0", "--n-logical", "4", "--seed", "5", "--output-dir", "out"];
    let out = run(&args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/sweep_cd.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,t_over_tau,fidelity_sq,energy,excess_energy,norm,y_0,y_1,y_2,y_3,y_4,y_5,y_6,y_7"
    );
    assert_eq!(lines.count(), 200);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/sweep_cd.json")).unwrap()).unwrap();
    assert_eq!(manifest["version"], lhz_cd::VERSION);
    assert_eq!(manifest["config"]["lambda_f"], 1.04);
    assert!(manifest["results"]["max_norm_drift"].as_f64().unwrap() < 1e-10);

    // identical bytes on a second run
    let out = run(&[&args[..12], &["out2"]].concat(), dir.path());
    assert!(out.status.success());
    for f in ["sweep_cd.csv", "instance.json"] {
        assert_eq!(std::fs::read(dir.path().join("out").join(f)).unwrap(), std::fs::read(dir.path().join("out2").join(f)).unwrap());
    }
}

#[test]
fn annealing_sweep_has_no_y_columns_and_instance_file_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sweep", "--protocol", "annealing", "--n-logical", "3", "--seed", "2", "--tau", "0.5", "--n-samples", "11", "--output-dir", "a"], dir.path());
    assert!(out.status.success());
    let first = std::fs::read_to_string(dir.path().join("a/sweep_annealing.csv")).unwrap();
    assert!(first.starts_with("t,t_over_tau,fidelity_sq,energy,excess_energy,norm\n"));
    assert_eq!(first.lines().count(), 12);

    let out = run(&["sweep", "--protocol", "annealing", "--instance-file", "a/instance.json", "--n-samples", "11", "--output-dir", "b"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let second = std::fs::read_to_string(dir.path().join("b/sweep_annealing.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"n_logical": 3, "seed": 4, "tau": 0.3, "protocol": "cd", "lambda_f": 1.0, "n_samples": 5}"#,
    )
    .unwrap();
    let out = run(&["sweep", "--config", "cfg.json", "--lambda-f", "0.5", "--output-dir", "o"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o/sweep_cd.json")).unwrap()).unwrap();
    assert_eq!(manifest["results"]["lambda_f"], 0.5);
    assert_eq!(manifest["config"]["tau"], 0.3);
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["spectrum", "--protocol", "annealing", "--n-logical", "3", "--n-times", "11"])
        .env("LHZ_CD_OUTPUT_DIR", dir.path().join("env_out"))
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("env_out/spectrum_annealing.csv")).unwrap();
    assert!(csv.starts_with("t,t_over_tau,e_0,e_1,e_2,e_3\n"));
    assert_eq!(csv.lines().count(), 12);
}

#[test]
fn config_errors_exit_2_and_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sweep", "--tau", "-1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let e = error_json(&out);
    assert_eq!(e["error"]["key"], "tau");
    assert_eq!(e["error"]["config_error"], "range");

    std::fs::write(dir.path().join("c.json"), r#"{"n_grid": "lots"}"#).unwrap();
    let out = run(&["scan-lambda", "--config", "c.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["config_error"], "type_mismatch");

    std::fs::write(dir.path().join("u.json"), r#"{"nlogical": 3}"#).unwrap();
    let out = run(&["spectrum", "--config", "u.json"], dir.path());
    assert_eq!(error_json(&out)["error"]["config_error"], "unknown_key");
    assert_eq!(error_json(&out)["error"]["key"], "nlogical");

    let out = run(&["sweep", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn module_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // missing instance file: I/O
    let out = run(&["sweep", "--instance-file", "nope.json"], dir.path());
    assert_eq!(out.status.code(), Some(8));
    assert_eq!(error_json(&out)["error"]["kind"], "io");

    // instance file with a wrong constraint list: lattice
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"n_logical": 3, "tau": 1.0, "h_start": [1,1,1,1], "j_final": [0.1,0.2,0.3,-10], "c_final": [2], "constraints": [[3,2,1,0]]}"#,
    )
    .unwrap();
    let out = run(&["sweep", "--instance-file", "bad.json", "--protocol", "annealing"], dir.path());
    assert_eq!(out.status.code(), Some(3));

    // step ceiling too small: dynamics
    let out = run(&["sweep", "--protocol", "annealing", "--n-logical", "3", "--steps", "1048576", "--output-dir", "x"], dir.path());
    assert_eq!(out.status.code(), Some(5), "{}", String::from_utf8_lossy(&out.stderr));

    // ensemble with an instance file is a configuration conflict
    let out = run(&["ensemble", "--instance-file", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_and_small_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["scan-lambda", "--n-logical", "4", "--seed", "3", "--tau", "1", "--n-grid", "21", "--lambda-bounds=-4,4", "--output-dir", "s", "--emit-gnuplot"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let scan = std::fs::read_to_string(dir.path().join("s/scan.csv")).unwrap();
    assert!(scan.starts_with("lambda_f,fidelity_sq\n"));
    assert_eq!(scan.lines().count(), 22);
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s/scan_fit.json")).unwrap()).unwrap();
    let keys: Vec<&String> = fit.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["amplitude", "baseline", "fwhm", "mean", "residual_rms", "sigma"]);
    assert!(dir.path().join("s/scan.gp").exists());

    let out = run(
        &["ensemble", "--n-logical", "3", "--n-instances", "3", "--tau-grid", "0.05,1", "--protocols", "annealing,cd", "--n-grid", "5", "--optimizer-tol", "0.1", "--lambda-bounds=-2,2", "--output-dir", "e", "--quiet"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["records.csv", "failures.csv", "summary.json", "histogram.csv", "ratios.csv", "manifest.json"] {
        assert!(dir.path().join("e").join(f).exists(), "{f}");
    }
    let stats = lhz_cd::ensemble::load(&dir.path().join("e")).unwrap();
    assert_eq!(stats.records.len(), 3 * 2 * 2);
}
