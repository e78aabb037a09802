// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Behavior of the command-line surface: exit codes, config handling,
//! format switches, and the thin-driver guarantee that file contents parse
//! back to the exact library values.

use aptsim::analytics::{overlap_p, rho_closed};
use aptsim::SystemParams;
use std::path::Path;
use std::process::{Command, Output};

fn aptsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aptsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn evolve_columns_parse_back_to_library_values() {
    let out = aptsim(&[
        "evolve",
        "--j",
        "0.06",
        "--gamma",
        "0.004",
        "--tau-max",
        "100",
        "--steps",
        "50",
    ]);
    assert_eq!(code(&out), 0);
    let params = SystemParams::new(0.06, 0.004).unwrap();
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "tau_us,rho00,rho11,re_rho01,im_rho01,trace,p_overlap"
    );
    let mut rows = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let rho = rho_closed(&params, cols[0]);
        // bit-for-bit: 17 significant digits parse to the identical double
        assert_eq!(cols[1], rho.rho00);
        assert_eq!(cols[2], rho.rho11);
        assert_eq!(cols[3], rho.rho01.re);
        assert_eq!(cols[4], rho.rho01.im);
        assert_eq!(cols[5], rho.trace());
        assert_eq!(cols[6], overlap_p(&params, cols[0]));
        rows += 1;
    }
    assert_eq!(rows, 50);
}

#[test]
fn evolve_tau_zero_gives_single_unit_row() {
    let out = aptsim(&["evolve", "--j", "0.06", "--gamma", "0.03", "--tau-max", "0"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("0.0000000000000000e0,1.0000000000000000e0,"));
}

#[test]
fn missing_required_flag_is_a_config_error() {
    let out = aptsim(&["evolve", "--j", "0.06", "--tau-max", "10"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "single-line diagnostic: {err}");
    assert!(err.contains("--gamma"));
}

#[test]
fn negative_parameter_is_a_config_error() {
    let out = aptsim(&["evolve", "--j", "-0.1", "--gamma", "0.0", "--tau-max", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn eigensweep_rejects_zero_gamma() {
    let out = aptsim(&["eigensweep", "--gamma", "0"]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("normalized eigenvalues undefined"));
}

#[test]
fn trajectory_guards_the_c_operator_domain() {
    let out = aptsim(&[
        "trajectory",
        "--j",
        "0.06",
        "--gamma",
        "0.12",
        "--tau",
        "50",
    ]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("r < 1"), "must cite the domain: {err}");

    let out = aptsim(&[
        "trajectory",
        "--j",
        "0.06",
        "--gamma",
        "0.12",
        "--tau",
        "50",
        "--allow-continuation",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("# non-physical"));
}

#[test]
fn trajectory_has_the_fixed_csv_schema() {
    let out = aptsim(&[
        "trajectory",
        "--j",
        "0.06",
        "--gamma",
        "0.03",
        "--tau",
        "50",
        "--steps",
        "7",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(
        text.lines().next().unwrap(),
        "t_us,x,y,z,x_norm,y_norm,z_norm,R,Theta,Phi"
    );
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn stationary_trajectory_for_eigenstate_without_loss() {
    let out = aptsim(&[
        "trajectory",
        "--j",
        "0.06",
        "--gamma",
        "0",
        "--tau",
        "50",
        "--steps",
        "5",
        "--initial",
        "eps-plus",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let normalized: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(4).take(3).collect())
        .collect();
    assert!(
        normalized.windows(2).all(|w| w[0] == w[1]),
        "rows differ: {text}"
    );
}

#[test]
fn tomography_ideal_reports_unit_fidelity() {
    let out = aptsim(&["tomography", "--ratio", "0.15", "--tau", "10", "--ideal"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((doc["fidelity"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
}

#[test]
fn tomography_sampled_has_fidelity_field() {
    let out = aptsim(&[
        "tomography",
        "--ratio",
        "0.15",
        "--tau",
        "10",
        "--shots",
        "10000",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let f = doc["fidelity"].as_f64().unwrap();
    assert!(f > 0.9 && f <= 1.0, "fidelity {f}");
    assert_eq!(doc["n_shots"].as_u64().unwrap(), 10000);
}

#[test]
fn tomography_total_loss_exits_4() {
    let out = aptsim(&[
        "tomography",
        "--ratio",
        "2.0",
        "--gamma",
        "0.5",
        "--tau",
        "50",
        "--ideal",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn malformed_config_exits_2_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = aptsim(&["evolve", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);

    std::fs::write(&path, r#"{"unknown_field": 3}"#).unwrap();
    let out = aptsim(&["evolve", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("evolve.json");
    std::fs::write(
        &path,
        r#"{"j": 0.06, "gamma": 0.03, "tau_max": 10.0, "steps": 3}"#,
    )
    .unwrap();
    let from_file = aptsim(&["evolve", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(stdout(&from_file).lines().count(), 4);

    // an explicit flag wins over the file value
    let overridden = aptsim(&["evolve", "--config", path.to_str().unwrap(), "--steps", "5"]);
    assert_eq!(stdout(&overridden).lines().count(), 6);
}

#[test]
fn unwritable_output_exits_3() {
    let out = aptsim(&[
        "evolve",
        "--j",
        "0.06",
        "--gamma",
        "0.03",
        "--tau-max",
        "1",
        "--output",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn help_lists_units_on_every_command() {
    for cmd in [
        "evolve",
        "eigensweep",
        "trajectory",
        "tomography",
        "calibrate",
    ] {
        let out = aptsim(&[cmd, "--help"]);
        assert_eq!(code(&out), 0);
        let text = stdout(&out);
        assert!(
            text.contains("1/us") || text.contains("[us]"),
            "{cmd} --help must state units:\n{text}"
        );
    }
}

#[test]
fn reproduce_presets_emit_provenance_headers() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["fig2a", "fig2b", "fig2c", "fig2d", "cpt-sphere"] {
        let path = dir.path().join(format!("{preset}.csv"));
        let out = aptsim(&[
            "reproduce",
            preset,
            "--shots",
            "200",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{preset} failed");
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(&format!("# preset {preset}")), "{preset}");
        assert!(text.lines().any(|l| l.contains("assumed")), "{preset}");
    }
    let out = aptsim(&["reproduce", "fig3", "--shots", "500"]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["provenance"].is_array());
    assert!(doc["fidelity"].is_number());
}

#[test]
fn eigensweep_records_failed_points_as_empty_fields() {
    // Readout error flipping every |0> outcome drives the measured overlap
    // to zero, which cannot be inverted: the point must come out empty, the
    // run must still succeed, and a warning count must reach stderr.
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("noise.json");
    std::fs::write(
        &cfg,
        r#"{"gamma": 0.05, "ratios": [1.5], "repeats": 2, "shots": 200,
            "noise_model": {"kind": "readout_error", "p01": 1.0, "p10": 0.0}}"#,
    )
    .unwrap();
    let out = aptsim(&["eigensweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("warning"), "stderr: {err}");
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[1], "", "re field must be empty: {row}");
    assert_eq!(cols[2], "", "im field must be empty: {row}");
    assert_eq!(cols[5], "0", "n_ok must be zero: {row}");
    assert!(!cols[6].is_empty(), "theory overlay stays filled: {row}");
}

#[test]
fn eigensweep_json_document_is_complete() {
    let out = aptsim(&[
        "eigensweep",
        "--gamma",
        "0.05",
        "--ratios",
        "0.5,1.0,1.5",
        "--exact",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["estimates"].as_array().unwrap().len(), 3);
    assert_eq!(doc["theory"].as_array().unwrap().len(), 3);
    assert_eq!(doc["gamma"].as_f64().unwrap(), 0.05);
    assert!(doc["exact"].as_bool().unwrap());
}

#[test]
fn calibrate_round_trips_through_the_cli() {
    let out = aptsim(&[
        "calibrate",
        "--kind",
        "gamma",
        "--gamma",
        "0.022",
        "--exact",
    ]);
    assert_eq!(code(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let fit = doc["fit"]["value"].as_f64().unwrap();
    assert!((fit - 0.022).abs() <= 1e-8);

    let out = aptsim(&["calibrate", "--kind", "j", "--j", "0.065", "--exact"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let fit = doc["fit"]["value"].as_f64().unwrap();
    assert!((fit - 0.065).abs() <= 1e-8);
    assert!(!doc["fit"]["alias_warning"].as_bool().unwrap());
}

#[test]
fn path_must_be_checked_before_compute() {
    // A long sweep against an unwritable path must fail fast on the path,
    // not after the computation; bounded runtime is the observable here.
    let t0 = std::time::Instant::now();
    let out = aptsim(&[
        "eigensweep",
        "--gamma",
        "0.05",
        "--repeats",
        "50",
        "--shots",
        "100000",
        "--output",
        "/nonexistent-dir/sweep.csv",
    ]);
    assert_eq!(code(&out), 3);
    assert!(t0.elapsed().as_secs_f64() < 60.0);
    assert!(!Path::new("/nonexistent-dir").exists());
}
