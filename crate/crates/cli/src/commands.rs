// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Implementations of the six subcommands.

use crate::config::{self, require};
use crate::output::{f, opt, write_json_pretty, Sink};
use crate::{
    CalibrateArgs, CalibrationKind, Cli, CliError, Command, EigensweepArgs, EvolveArgs, Format,
    GlobalOpts, InitialState, Preset, ReproduceArgs, TomographyArgs, TrajectoryArgs,
};
use aptsim::analytics::{dissipation_decay, overlap_p, rho_closed, DensityMatrix2};
use aptsim::cpt::{trajectory_with_frame, write_trajectory_csv, CptFrame, TrajectoryPoint};
use aptsim::lab::{
    calibrate_gamma, calibrate_j, calibration_taus, dissipation_records, fit_decay, fit_rabi,
    measure_overlap_p, rabi_records, run_eigenvalue_protocol, run_eigenvalue_protocol_exact,
    tomography, tomography_exact, EigenvalueEstimate, FitResult, NoiseModel, ShotConfig,
    DEFAULT_CALIBRATION_POINTS,
};
use aptsim::{eigenvalues_apt_normalized, QubitState, SystemParams, C64};
use serde::Serialize;
use std::io::Write;

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evolve(args) => evolve(&args, &cli.global),
        Command::Eigensweep(args) => eigensweep(&args, &cli.global),
        Command::Trajectory(args) => trajectory(&args, &cli.global),
        Command::Tomography(args) => cmd_tomography(&args, &cli.global),
        Command::Calibrate(args) => calibrate(&args, &cli.global),
        Command::Reproduce(args) => reproduce(&args, &cli.global),
    }
}

fn params_checked(j: f64, gamma: f64) -> Result<SystemParams, CliError> {
    SystemParams::new(j, gamma).map_err(|e| CliError::Config(e.to_string()))
}

fn time_grid(tau_max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !tau_max.is_finite() || tau_max < 0.0 {
        return Err(CliError::Config(format!(
            "tau-max = {tau_max} must be >= 0"
        )));
    }
    if steps < 1 {
        return Err(CliError::Config("steps must be >= 1".into()));
    }
    if tau_max == 0.0 || steps == 1 {
        return Ok(vec![0.0]);
    }
    Ok((0..steps)
        .map(|i| tau_max * i as f64 / (steps - 1) as f64)
        .collect())
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EvolveRow {
    tau_us: f64,
    rho00: f64,
    rho11: f64,
    re_rho01: f64,
    im_rho01: f64,
    trace: f64,
    p_overlap: f64,
}

fn evolve_rows(params: &SystemParams, taus: &[f64]) -> Vec<EvolveRow> {
    taus.iter()
        .map(|&tau| {
            let rho = rho_closed(params, tau);
            EvolveRow {
                tau_us: tau,
                rho00: rho.rho00,
                rho11: rho.rho11,
                re_rho01: rho.rho01.re,
                im_rho01: rho.rho01.im,
                trace: rho.trace(),
                p_overlap: overlap_p(params, tau),
            }
        })
        .collect()
}

fn evolve(args: &EvolveArgs, global: &GlobalOpts) -> Result<(), CliError> {
    let file: config::EvolveFile = config::load(global.config.as_deref())?;
    let j = require(args.j, file.j, "j")?;
    let gamma = require(args.gamma, file.gamma, "gamma")?;
    let tau_max = require(args.tau_max, file.tau_max, "tau-max")?;
    let steps = args.steps.or(file.steps).unwrap_or(200);

    let params = params_checked(j, gamma)?;
    let taus = time_grid(tau_max, steps)?;

    let mut sink = Sink::open(global.output.as_deref())?;
    let rows = evolve_rows(&params, &taus);
    let w = sink.writer();
    match global.format {
        Format::Csv => {
            writeln!(w, "tau_us,rho00,rho11,re_rho01,im_rho01,trace,p_overlap")?;
            for r in &rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    f(r.tau_us),
                    f(r.rho00),
                    f(r.rho11),
                    f(r.re_rho01),
                    f(r.im_rho01),
                    f(r.trace),
                    f(r.p_overlap)
                )?;
            }
        }
        Format::Json => write_json_pretty(w, &rows)?,
    }
    sink.finish()
}

// ---------------------------------------------------------------------------
// eigensweep
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct TheoryPoint {
    ratio: f64,
    e_plus: C64,
    e_minus: C64,
}

#[derive(Serialize)]
struct SweepDocument {
    gamma: f64,
    ratios: Vec<f64>,
    exact: bool,
    n_shots: u64,
    n_repeats: usize,
    seed: u64,
    noise_model: NoiseModel,
    estimates: Vec<EigenvalueEstimate>,
    theory: Vec<TheoryPoint>,
}

fn ratio_grid(args: &EigensweepArgs, file: &config::EigensweepFile) -> Result<Vec<f64>, CliError> {
    if let Some(list) = args.ratios.clone().or_else(|| file.ratios.clone()) {
        if list.is_empty() {
            return Err(CliError::Config("ratio list is empty".into()));
        }
        return Ok(list);
    }
    let min = args.ratio_min.or(file.ratio_min).unwrap_or(0.2);
    let max = args.ratio_max.or(file.ratio_max).unwrap_or(2.0);
    let step = args.ratio_step.or(file.ratio_step).unwrap_or(0.1);
    if !step.is_finite() || step <= 0.0 || !min.is_finite() || !max.is_finite() || max < min {
        return Err(CliError::Config(format!(
            "bad ratio range [{min}, {max}] step {step}"
        )));
    }
    let n = ((max - min) / step).round() as usize + 1;
    Ok((0..n).map(|i| min + step * i as f64).collect())
}

fn eigensweep(args: &EigensweepArgs, global: &GlobalOpts) -> Result<(), CliError> {
    let file: config::EigensweepFile = config::load(global.config.as_deref())?;
    let gamma = require(args.gamma, file.gamma, "gamma")?;
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(CliError::Config(
            "normalized eigenvalues undefined for gamma = 0".into(),
        ));
    }
    let ratios = ratio_grid(args, &file)?;
    if ratios.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(CliError::Config("every ratio must be > 0".into()));
    }
    let exact = args.exact || file.exact.unwrap_or(false);
    let repeats = args.repeats.or(file.repeats).unwrap_or(3);
    let n_shots = global.shots.or(file.shots).unwrap_or(1000);
    let noise_model = file.noise_model.unwrap_or(NoiseModel::Ideal);

    let j_list: Vec<f64> = ratios.iter().map(|r| r * gamma).collect();
    let cfg = ShotConfig {
        n_shots,
        rng_seed: global.seed,
        noise_model,
    };
    let mut sink = Sink::open(global.output.as_deref())?;
    let estimates = if exact {
        run_eigenvalue_protocol_exact(gamma, &j_list)?
    } else {
        run_eigenvalue_protocol(gamma, &j_list, &cfg, repeats)?
    };

    let theory: Vec<TheoryPoint> = ratios
        .iter()
        .map(|&r| {
            let params = params_checked(r * gamma, gamma)?;
            let (e_plus, e_minus) = eigenvalues_apt_normalized(&params)?;
            Ok(TheoryPoint {
                ratio: r,
                e_plus,
                e_minus,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let failed = estimates.iter().filter(|e| e.n_ok == 0).count();

    let w = sink.writer();
    match global.format {
        Format::Csv => {
            write_sweep_csv(w, &estimates, &theory)?;
        }
        Format::Json => {
            let doc = SweepDocument {
                gamma,
                ratios,
                exact,
                n_shots,
                n_repeats: if exact { 1 } else { repeats },
                seed: global.seed,
                noise_model,
                estimates,
                theory,
            };
            write_json_pretty(w, &doc)?;
        }
    }
    sink.finish()?;
    if failed > 0 {
        eprintln!("aptsim: warning: {failed} sweep point(s) without successful repetitions");
    }
    Ok(())
}

fn write_sweep_csv(
    w: &mut dyn Write,
    estimates: &[EigenvalueEstimate],
    theory: &[TheoryPoint],
) -> Result<(), CliError> {
    writeln!(
        w,
        "ratio,re_E_plus,im_E_plus,std_re,std_im,n_ok,re_E_plus_theory,im_E_plus_theory"
    )?;
    for (est, th) in estimates.iter().zip(theory) {
        let (re, im, sre, sim) = match est.e_plus {
            Some(e) => (
                Some(e.re),
                Some(e.im),
                Some(est.std_real),
                Some(est.std_imag),
            ),
            None => (None, None, None, None),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            f(est.ratio),
            opt(re),
            opt(im),
            opt(sre),
            opt(sim),
            est.n_ok,
            f(th.e_plus.re),
            f(th.e_plus.im)
        )?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// trajectory
// ---------------------------------------------------------------------------

fn initial_state(kind: InitialState, frame: &CptFrame) -> QubitState {
    let s = 0.5f64.sqrt();
    match kind {
        InitialState::Minus => QubitState::new(C64::new(s, 0.0), C64::new(-s, 0.0)),
        InitialState::Plus => QubitState::new(C64::new(s, 0.0), C64::new(s, 0.0)),
        InitialState::Zero => QubitState::ket0(),
        InitialState::One => QubitState::ket1(),
        InitialState::EpsPlus => *frame.eps_plus(),
        InitialState::EpsMinus => *frame.eps_minus(),
    }
}

fn trajectory(args: &TrajectoryArgs, global: &GlobalOpts) -> Result<(), CliError> {
    let file: config::TrajectoryFile = config::load(global.config.as_deref())?;
    let j = require(args.j, file.j, "j")?;
    let gamma = require(args.gamma, file.gamma, "gamma")?;
    let tau = require(args.tau, file.tau, "tau")?;
    let steps = args.steps.or(file.steps).unwrap_or(200).max(2);
    let initial = args.initial.or(file.initial).unwrap_or(InitialState::Minus);
    let allow = args.allow_continuation || file.allow_continuation.unwrap_or(false);

    let params = params_checked(j, gamma)?;
    let frame = if allow {
        CptFrame::new_with_continuation(&params)
    } else {
        CptFrame::new(&params).map_err(|e| {
            aptsim::Error::InvalidParams(format!(
                "{e}; pass --allow-continuation to evaluate the analytic continuation anyway"
            ))
        })
    }?;

    let psi0 = initial_state(initial, &frame);
    let mut sink = Sink::open(global.output.as_deref())?;
    let traj = trajectory_with_frame(&frame, &psi0, tau, steps)?;
    let w = sink.writer();
    match global.format {
        Format::Csv => {
            if !frame.regime_valid() {
                writeln!(
                    w,
                    "# non-physical: r = Gamma/J = {} >= 1, analytic continuation of C",
                    frame.r()
                )?;
            }
            write_trajectory_csv(&mut *w, &traj)?;
        }
        Format::Json => write_json_pretty(w, &traj)?,
    }
    sink.finish()
}

// ---------------------------------------------------------------------------
// tomography
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct TomographyDocument {
    j: f64,
    gamma: f64,
    ratio: f64,
    tau_us: f64,
    ideal: bool,
    n_shots: u64,
    seed: u64,
    noise_model: NoiseModel,
    fidelity: f64,
    rho_exp: DensityMatrix2,
    rho_theory: DensityMatrix2,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<Vec<String>>,
}

fn cmd_tomography(args: &TomographyArgs, global: &GlobalOpts) -> Result<(), CliError> {
    let file: config::TomographyFile = config::load(global.config.as_deref())?;
    let ratio = require(args.ratio, file.ratio, "ratio")?;
    let tau = require(args.tau, file.tau, "tau")?;
    // The absolute rate is a free input; 0.4 1/us places the reference
    // ratio-0.15, 10-us operating point in its intended strong-loss regime.
    let gamma = args.gamma.or(file.gamma).unwrap_or(0.4);
    let ideal = args.ideal || file.ideal.unwrap_or(false);
    let n_shots = global.shots.or(file.shots).unwrap_or(1000);
    let noise_model = file.noise_model.unwrap_or(NoiseModel::Ideal);

    let mut sink = Sink::open(global.output.as_deref())?;
    let doc = tomography_document(
        ratio,
        gamma,
        tau,
        ideal,
        n_shots,
        global.seed,
        noise_model,
        None,
    )?;
    write_json_pretty(sink.writer(), &doc)?;
    sink.finish()
}

#[allow(clippy::too_many_arguments)]
fn tomography_document(
    ratio: f64,
    gamma: f64,
    tau: f64,
    ideal: bool,
    n_shots: u64,
    seed: u64,
    noise_model: NoiseModel,
    provenance: Option<Vec<String>>,
) -> Result<TomographyDocument, CliError> {
    let j = ratio * gamma;
    let params = params_checked(j, gamma)?;
    let result = if ideal {
        tomography_exact(&params, tau)?
    } else {
        let cfg = ShotConfig {
            n_shots,
            rng_seed: seed,
            noise_model,
        };
        tomography(&params, tau, &cfg)?
    };
    Ok(TomographyDocument {
        j,
        gamma,
        ratio,
        tau_us: tau,
        ideal,
        n_shots,
        seed,
        noise_model,
        fidelity: result.fidelity,
        rho_exp: result.rho_exp,
        rho_theory: result.rho_theory,
        provenance,
    })
}

// ---------------------------------------------------------------------------
// calibrate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CalibrationDocument {
    kind: &'static str,
    true_value: f64,
    exact: bool,
    n_points: usize,
    n_shots: u64,
    seed: u64,
    noise_model: NoiseModel,
    tau_grid_us: Vec<f64>,
    fit: FitResult,
}

fn calibrate(args: &CalibrateArgs, global: &GlobalOpts) -> Result<(), CliError> {
    let file: config::CalibrateFile = config::load(global.config.as_deref())?;
    let kind = require(args.kind, file.kind, "kind")?;
    let exact = args.exact || file.exact.unwrap_or(false);
    let n_shots = global.shots.or(file.shots).unwrap_or(1000);
    let noise_model = file.noise_model.unwrap_or(NoiseModel::Ideal);
    let cfg = ShotConfig {
        n_shots,
        rng_seed: global.seed,
        noise_model,
    };

    let mut sink = Sink::open(global.output.as_deref())?;
    let doc = match kind {
        CalibrationKind::Gamma => {
            let gamma = require(args.gamma, file.gamma, "gamma")?;
            if !gamma.is_finite() || gamma <= 0.0 {
                return Err(CliError::Config("gamma must be > 0".into()));
            }
            let n_points = args
                .points
                .or(file.points)
                .unwrap_or(DEFAULT_CALIBRATION_POINTS);
            let taus = calibration_taus(gamma, n_points);
            let fit = if exact {
                let points: Vec<(f64, f64)> = taus
                    .iter()
                    .map(|&t| (t, dissipation_decay(gamma, t)))
                    .collect();
                fit_decay(&points)?
            } else {
                calibrate_gamma(&dissipation_records(gamma, &taus, &cfg)?)?
            };
            CalibrationDocument {
                kind: "gamma",
                true_value: gamma,
                exact,
                n_points,
                n_shots,
                seed: global.seed,
                noise_model,
                tau_grid_us: taus,
                fit,
            }
        }
        CalibrationKind::J => {
            let j = require(args.j, file.j, "j")?;
            if !j.is_finite() || j <= 0.0 {
                return Err(CliError::Config("j must be > 0".into()));
            }
            let n_points = args.points.or(file.points).unwrap_or(24);
            let span = 1.5 * std::f64::consts::PI / j;
            let taus: Vec<f64> = (0..n_points)
                .map(|i| span * i as f64 / (n_points.max(2) - 1) as f64)
                .collect();
            let fit = if exact {
                let points: Vec<(f64, f64)> =
                    taus.iter().map(|&t| (t, (j * t).sin().powi(2))).collect();
                fit_rabi(&points)?
            } else {
                calibrate_j(&rabi_records(j, &taus, &cfg)?)?
            };
            CalibrationDocument {
                kind: "j",
                true_value: j,
                exact,
                n_points,
                n_shots,
                seed: global.seed,
                noise_model,
                tau_grid_us: taus,
                fit,
            }
        }
    };

    write_json_pretty(sink.writer(), &doc)?;
    sink.finish()
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

fn reproduce(args: &ReproduceArgs, global: &GlobalOpts) -> Result<(), CliError> {
    match args.preset {
        Preset::Fig2a => preset_fig2a(global),
        Preset::Fig2b => preset_fig2b(global),
        Preset::Fig2c => preset_fig2c(global),
        Preset::Fig2d => preset_fig2d(global),
        Preset::Fig3 => preset_fig3(global),
        Preset::CptSphere => preset_cpt_sphere(global),
    }
}

fn preset_fig2a(global: &GlobalOpts) -> Result<(), CliError> {
    let broken = params_checked(0.06, 0.004)?;
    let symmetric = params_checked(0.06, 0.53)?;
    let taus = time_grid(100.0, 201)?;

    let mut sink = Sink::open(global.output.as_deref())?;
    let w = sink.writer();
    writeln!(w, "# preset fig2a: |0> population vs evolution time")?;
    writeln!(
        w,
        "# J = 0.06 1/us; Gamma = 0.004 1/us (broken) and 0.53 1/us (symmetric)"
    )?;
    writeln!(
        w,
        "# assumed: tau grid 0..100 us, 201 samples (grid not fixed by the reference data)"
    )?;
    writeln!(w, "tau_us,rho00_broken,rho00_symmetric")?;
    for &tau in &taus {
        writeln!(
            w,
            "{},{},{}",
            f(tau),
            f(rho_closed(&broken, tau).rho00),
            f(rho_closed(&symmetric, tau).rho00)
        )?;
    }
    sink.finish()
}

fn preset_fig2b(global: &GlobalOpts) -> Result<(), CliError> {
    let taus = time_grid(25.0, 101)?;
    let mut sink = Sink::open(global.output.as_deref())?;
    let w = sink.writer();
    writeln!(
        w,
        "# preset fig2b: |1> population under pure dissipation, exp(-4*Gamma*tau)"
    )?;
    writeln!(w, "# Gamma = 0.022 1/us and 0.050 1/us")?;
    writeln!(w, "# assumed: tau grid 0..25 us, 101 samples")?;
    writeln!(w, "tau_us,p1_gamma_0p022,p1_gamma_0p050")?;
    for &tau in &taus {
        writeln!(
            w,
            "{},{},{}",
            f(tau),
            f(dissipation_decay(0.022, tau)),
            f(dissipation_decay(0.050, tau))
        )?;
    }
    sink.finish()
}

fn preset_fig2c(global: &GlobalOpts) -> Result<(), CliError> {
    let params = params_checked(0.065, 0.022)?;
    let taus = time_grid(60.0, 61)?;
    let n_shots = global.shots.unwrap_or(1000);

    let mut sink = Sink::open(global.output.as_deref())?;
    let w = sink.writer();
    writeln!(
        w,
        "# preset fig2c: overlap signal P(tau), theory and shot-sampled"
    )?;
    writeln!(w, "# J = 0.065 1/us, Gamma = 0.022 1/us")?;
    writeln!(
        w,
        "# assumed: tau grid 0..60 us, 61 samples; {n_shots} shots/point, seed {}",
        global.seed
    )?;
    writeln!(w, "tau_us,p_theory,p_measured")?;
    for (i, &tau) in taus.iter().enumerate() {
        let cfg = ShotConfig::ideal(n_shots, aptsim::lab::derive_seed(global.seed, i as u64, 0));
        writeln!(
            w,
            "{},{},{}",
            f(tau),
            f(overlap_p(&params, tau)),
            f(measure_overlap_p(&params, tau, &cfg)?)
        )?;
    }
    sink.finish()
}

fn preset_fig2d(global: &GlobalOpts) -> Result<(), CliError> {
    let gamma = 0.050;
    let ratios: Vec<f64> = (0..19).map(|i| 0.2 + 0.1 * i as f64).collect();
    let j_list: Vec<f64> = ratios.iter().map(|r| r * gamma).collect();
    let n_shots = global.shots.unwrap_or(1000);
    let cfg = ShotConfig::ideal(n_shots, global.seed);
    let mut sink = Sink::open(global.output.as_deref())?;
    let estimates = run_eigenvalue_protocol(gamma, &j_list, &cfg, 3)?;
    let theory: Vec<TheoryPoint> = ratios
        .iter()
        .map(|&r| {
            let params = params_checked(r * gamma, gamma)?;
            let (e_plus, e_minus) = eigenvalues_apt_normalized(&params)?;
            Ok(TheoryPoint {
                ratio: r,
                e_plus,
                e_minus,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let w = sink.writer();
    writeln!(
        w,
        "# preset fig2d: normalized eigenvalue E_plus/Gamma vs J/Gamma"
    )?;
    writeln!(
        w,
        "# Gamma = 0.050 1/us, tau0 = 1/J, 3 repetitions per point"
    )?;
    writeln!(
        w,
        "# assumed: ratio grid 0.2..2.0 step 0.1; {n_shots} shots/point, seed {}",
        global.seed
    )?;
    write_sweep_csv(w, &estimates, &theory)?;
    sink.finish()
}

fn preset_fig3(global: &GlobalOpts) -> Result<(), CliError> {
    let n_shots = global.shots.unwrap_or(10_000);
    let provenance = vec![
        "preset fig3: tomography after a 10 us anti-PT evolution at J/Gamma = 0.15".to_string(),
        "assumed: Gamma = 0.4 1/us (absolute rate is a free input at this ratio)".to_string(),
        format!("assumed: {n_shots} shots/basis, seed {}", global.seed),
    ];
    let mut sink = Sink::open(global.output.as_deref())?;
    let doc = tomography_document(
        0.15,
        0.4,
        10.0,
        false,
        n_shots,
        global.seed,
        NoiseModel::Ideal,
        Some(provenance),
    )?;
    write_json_pretty(sink.writer(), &doc)?;
    sink.finish()
}

fn preset_cpt_sphere(global: &GlobalOpts) -> Result<(), CliError> {
    let params = params_checked(0.06, 0.03)?;
    let frame = CptFrame::new(&params)?;
    let s = 0.5f64.sqrt();
    let psi0 = QubitState::new(C64::new(s, 0.0), C64::new(-s, 0.0));
    let mut sink = Sink::open(global.output.as_deref())?;
    let traj: Vec<TrajectoryPoint> = trajectory_with_frame(&frame, &psi0, 50.0, 201)?;
    let w = sink.writer();
    writeln!(
        w,
        "# preset cpt-sphere: trajectory on the non-Hermitian Bloch sphere"
    )?;
    writeln!(
        w,
        "# J = 0.06 1/us, Gamma = 0.03 1/us, hold 0..50 us, start (|0>-|1>)/sqrt(2)"
    )?;
    writeln!(
        w,
        "# assumed: 201 samples; over-damped variant: trajectory --gamma 0.12 --allow-continuation"
    )?;
    write_trajectory_csv(&mut *w, &traj)?;
    sink.finish()
}
