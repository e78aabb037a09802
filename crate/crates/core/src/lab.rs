// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulated experiment layer.
//!
//! Everything here is built from the lower layers plus an explicit seeded
//! RNG, so identical inputs and seeds give bit-identical outputs. Sweep
//! points may be evaluated concurrently because every (point, repetition)
//! pair derives an independent stream via [`derive_seed`].
//!
//! Measurement model: a shot ends in one of three outcomes: `0`, `1`, or
//! `lost` (population removed from the qubit manifold by dissipation), drawn
//! with probabilities `|amp0|^2`, `|amp1|^2`, `1 - |amp0|^2 - |amp1|^2`
//! after rotating into the requested basis. Sub-unit traces are therefore
//! directly observable. Basis pre-rotations:
//!
//! | basis | pre-rotation | `n0` counts projections onto |
//! |-------|--------------|-------------------------------|
//! | Z     | none         | `\|0>`                        |
//! | X     | `Ry(-pi/2)`  | `(\|0> + \|1>)/sqrt(2)`       |
//! | Y     | `Rx(+pi/2)`  | `(\|0> + i\|1>)/sqrt(2)`      |
//!
//! Noise models (all default off): multiplicative Gaussian jitter on the
//! dissipation rate (one draw per prepare-evolve-measure run, applied to
//! every dissipative segment of that run), additive Gaussian jitter on each
//! rotation angle, and classical readout flips `0 -> 1` / `1 -> 0`.

use crate::analytics::{
    dissipation_decay, invert_overlap, overlap_p, rho_closed, state_closed, DensityMatrix2,
};
use crate::error::{Error, Result};
use crate::linalg::{QubitState, C64};
use crate::model::SystemParams;
use crate::pulse::{compile_apt_evolution, rotation, Axis, PulseSegment, PulseSequence};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
    Y,
}

impl Basis {
    fn pre_rotation(&self) -> Option<(Axis, f64)> {
        match self {
            Basis::Z => None,
            Basis::X => Some((Axis::Y, -FRAC_PI_2)),
            Basis::Y => Some((Axis::X, FRAC_PI_2)),
        }
    }
}

/// Stochastic imperfections applied by the lab layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// Shot noise only.
    Ideal,
    /// `Gamma -> Gamma * (1 + sigma_rel * xi)`, `xi ~ N(0,1)`, one draw per
    /// run, clamped at zero.
    GammaJitter { sigma_rel: f64 },
    /// Every rotation angle picks up an independent `N(0, sigma_rad)` offset.
    PulseAngleJitter { sigma_rad: f64 },
    /// Classical readout flips: `P(read 1 | outcome 0) = p01`,
    /// `P(read 0 | outcome 1) = p10`. Lost shots are unaffected.
    ReadoutError { p01: f64, p10: f64 },
}

/// Shot count, seed, and noise model for one simulated measurement batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotConfig {
    pub n_shots: u64,
    pub rng_seed: u64,
    pub noise_model: NoiseModel,
}

impl ShotConfig {
    pub fn ideal(n_shots: u64, rng_seed: u64) -> Self {
        ShotConfig {
            n_shots,
            rng_seed,
            noise_model: NoiseModel::Ideal,
        }
    }

    pub fn with_seed(&self, rng_seed: u64) -> Self {
        ShotConfig { rng_seed, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_shots < 1 {
            return Err(Error::InvalidParams("n_shots must be >= 1".into()));
        }
        let ok = match self.noise_model {
            NoiseModel::Ideal => true,
            NoiseModel::GammaJitter { sigma_rel } => sigma_rel >= 0.0 && sigma_rel.is_finite(),
            NoiseModel::PulseAngleJitter { sigma_rad } => sigma_rad >= 0.0 && sigma_rad.is_finite(),
            NoiseModel::ReadoutError { p01, p10 } => {
                (0.0..=1.0).contains(&p01) && (0.0..=1.0).contains(&p10)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!(
                "invalid noise model {:?}",
                self.noise_model
            )))
        }
    }
}

/// Trinomial outcome counts of one batch; `n0 + n1 + n_lost = n_shots`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub n0: u64,
    pub n1: u64,
    pub n_lost: u64,
}

impl Counts {
    pub fn n_shots(&self) -> u64 {
        self.n0 + self.n1 + self.n_lost
    }

    pub fn p0_hat(&self) -> f64 {
        self.n0 as f64 / self.n_shots() as f64
    }

    pub fn p1_hat(&self) -> f64 {
        self.n1 as f64 / self.n_shots() as f64
    }
}

/// One shot-sampled data point together with its acquisition context.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub basis: Basis,
    pub counts: Counts,
    pub tau_us: f64,
    pub nominal: SystemParams,
}

/// Mix a base seed with a sweep-point index and repetition index into an
/// independent stream seed (splitmix64 steps). This is the documented
/// derivation used by every sweep in this module.
pub fn derive_seed(base: u64, point: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(base ^ point.wrapping_mul(0x9E37_79B9_7F4A_7C15)) ^ rep)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_from(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn normal_draw(rng: &mut ChaCha12Rng, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    Normal::new(0.0, sigma)
        .expect("validated sigma")
        .sample(rng)
}

/// Sample `n_shots` trinomial outcomes of a measurement of `psi` in `basis`.
/// Deterministic for a fixed `cfg.rng_seed`.
pub fn sample_measurement(psi: &QubitState, basis: Basis, cfg: &ShotConfig) -> Result<Counts> {
    cfg.validate()?;
    let mut rng = rng_from(cfg.rng_seed);
    sample_with_rng(psi, basis, cfg, &mut rng)
}

fn sample_with_rng(
    psi: &QubitState,
    basis: Basis,
    cfg: &ShotConfig,
    rng: &mut ChaCha12Rng,
) -> Result<Counts> {
    let norm_sqr = psi.norm_sqr();
    if norm_sqr > 1.0 + 1e-6 {
        return Err(Error::InvalidState(norm_sqr));
    }

    let rotated = match basis.pre_rotation() {
        None => *psi,
        Some((axis, angle)) => {
            let angle = match cfg.noise_model {
                NoiseModel::PulseAngleJitter { sigma_rad } => angle + normal_draw(rng, sigma_rad),
                _ => angle,
            };
            rotation(axis, angle).apply(psi)
        }
    };

    let mut p0 = rotated.amp0.norm_sqr().clamp(0.0, 1.0);
    let mut p1 = rotated.amp1.norm_sqr().clamp(0.0, 1.0);
    let sum = p0 + p1;
    if sum > 1.0 {
        p0 /= sum;
        p1 /= sum;
    }

    let (mut n0, mut n1, mut n_lost) = (0u64, 0u64, 0u64);
    for _ in 0..cfg.n_shots {
        let u: f64 = rng.random();
        let mut outcome = if u < p0 {
            0u8
        } else if u < p0 + p1 {
            1
        } else {
            2
        };
        if let NoiseModel::ReadoutError { p01, p10 } = cfg.noise_model {
            if outcome == 0 && rng.random::<f64>() < p01 {
                outcome = 1;
            } else if outcome == 1 && rng.random::<f64>() < p10 {
                outcome = 0;
            }
        }
        match outcome {
            0 => n0 += 1,
            1 => n1 += 1,
            _ => n_lost += 1,
        }
    }
    Ok(Counts { n0, n1, n_lost })
}

/// Jittered copy of a pulse program: one multiplicative scale on all
/// dissipation rates per call, an independent additive offset per rotation.
fn apply_sequence_noise(
    seq: &PulseSequence,
    noise: &NoiseModel,
    rng: &mut ChaCha12Rng,
) -> PulseSequence {
    match *noise {
        NoiseModel::Ideal | NoiseModel::ReadoutError { .. } => seq.clone(),
        NoiseModel::GammaJitter { sigma_rel } => {
            let factor = (1.0 + normal_draw(rng, sigma_rel)).max(0.0);
            PulseSequence::new(
                seq.segments
                    .iter()
                    .map(|s| match *s {
                        PulseSegment::HoldHm { j, gamma, duration } => PulseSegment::HoldHm {
                            j,
                            gamma: gamma * factor,
                            duration,
                        },
                        PulseSegment::HoldDissipation { gamma, duration } => {
                            PulseSegment::HoldDissipation {
                                gamma: gamma * factor,
                                duration,
                            }
                        }
                        other => other,
                    })
                    .collect(),
            )
        }
        NoiseModel::PulseAngleJitter { sigma_rad } => PulseSequence::new(
            seq.segments
                .iter()
                .map(|s| match *s {
                    PulseSegment::Rotation { axis, angle } => PulseSegment::Rotation {
                        axis,
                        angle: angle + normal_draw(rng, sigma_rad),
                    },
                    other => other,
                })
                .collect(),
        ),
    }
}

// ---------------------------------------------------------------------------
// Calibration fits
// ---------------------------------------------------------------------------

/// Result of a one-parameter least-squares calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub value: f64,
    pub stderr: f64,
    pub iterations: usize,
    /// Set when the frequency search found the objective degenerate (flat
    /// data, or two separated near-equal minima).
    pub alias_warning: bool,
}

const GN_MAX_ITER: usize = 50;
const GN_STEP_TOL: f64 = 1e-12;
const GN_MAX_HALVINGS: usize = 10;

/// Damped Gauss-Newton refinement of a scalar parameter. `model` returns
/// the prediction and its derivative at a sample point.
fn gauss_newton<F>(points: &[(f64, f64)], mut param: f64, model: F) -> Result<(f64, f64, usize)>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let ssr = |p: f64| -> f64 {
        points
            .iter()
            .map(|&(t, y)| {
                let (m, _) = model(p, t);
                (y - m) * (y - m)
            })
            .sum()
    };

    let mut current_ssr = ssr(param);
    let mut iterations = 0;
    for _ in 0..GN_MAX_ITER {
        iterations += 1;
        let mut num = 0.0;
        let mut denom = 0.0;
        for &(t, y) in points {
            let (m, g) = model(param, t);
            num += g * (y - m);
            denom += g * g;
        }
        if denom == 0.0 {
            break; // flat model: nothing to refine
        }
        let step = num / denom;
        if step.abs() <= GN_STEP_TOL * param.abs().max(1.0) {
            break;
        }
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..GN_MAX_HALVINGS {
            let candidate = param + scale * step;
            let candidate_ssr = ssr(candidate);
            if candidate_ssr <= current_ssr {
                param = candidate;
                current_ssr = candidate_ssr;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            // The linearized model predicts an SSR drop of num*step. When
            // that is below the rounding floor of the current SSR the
            // optimum is already reached and the residual cannot decrease;
            // only a step that should have helped and did not is divergence.
            if num * step <= 1e-12 * current_ssr.max(f64::MIN_POSITIVE) {
                break;
            }
            return Err(Error::FitDiverged(GN_MAX_HALVINGS));
        }
    }

    // Standard error from the linearized normal equations at the optimum.
    let mut denom = 0.0;
    for &(t, _) in points {
        let (_, g) = model(param, t);
        denom += g * g;
    }
    let dof = points.len().saturating_sub(1);
    let stderr = if denom > 0.0 && dof > 0 {
        (current_ssr / dof as f64 / denom).sqrt()
    } else {
        f64::INFINITY
    };
    Ok((param, stderr, iterations))
}

/// Fit `(tau_k, y_k)` samples to the pure-dissipation law `y = exp(-4 Gamma
/// tau)`, initialized by a log-linear regression through the origin and
/// refined by damped Gauss-Newton.
pub fn fit_decay(points: &[(f64, f64)]) -> Result<FitResult> {
    validate_points(points, 3)?;
    let mut num = 0.0;
    let mut denom = 0.0;
    for &(t, y) in points {
        if y > 0.0 && t > 0.0 {
            num += t * y.ln();
            denom += t * t;
        }
    }
    let init = if denom > 0.0 {
        (-num / denom / 4.0).max(0.0)
    } else {
        0.0
    };

    let model = |gamma: f64, t: f64| {
        let m = (-4.0 * gamma * t).exp();
        (m, -4.0 * t * m)
    };
    let (value, stderr, iterations) = gauss_newton(points, init, model)?;
    Ok(FitResult {
        value,
        stderr,
        iterations,
        alias_warning: false,
    })
}

/// Fit `(tau_k, y_k)` samples to the resonant-drive law `y = sin^2(J tau)`.
///
/// The frequency is located by a coarse grid search up to the Nyquist limit
/// of the sampling (resolution `pi / (4 tau_max)`), then refined by damped
/// Gauss-Newton. The `alias_warning` flag is raised when the data cannot pin
/// the frequency: zero sample variance, or two separated grid minima with
/// near-equal residuals.
pub fn fit_rabi(points: &[(f64, f64)]) -> Result<FitResult> {
    validate_points(points, 8)?;

    let mut taus: Vec<f64> = points.iter().map(|p| p.0).collect();
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tau_max = *taus.last().unwrap();
    let min_spacing = taus
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min);
    if tau_max <= 0.0 || !min_spacing.is_finite() {
        return Err(Error::InvalidParams(
            "rabi fit needs at least two distinct positive times".into(),
        ));
    }

    let j_nyquist = PI / (2.0 * min_spacing);
    let resolution = PI / (4.0 * tau_max);
    let n_grid = (j_nyquist / resolution).ceil() as usize + 1;

    let ssr = |j: f64| -> f64 {
        points
            .iter()
            .map(|&(t, y)| {
                let m = (j * t).sin().powi(2);
                (y - m) * (y - m)
            })
            .sum()
    };

    let grid_ssr: Vec<f64> = (0..n_grid).map(|i| ssr(i as f64 * resolution)).collect();
    let best_idx = (0..n_grid)
        .min_by(|&a, &b| grid_ssr[a].partial_cmp(&grid_ssr[b]).unwrap())
        .unwrap();

    // Alias detection.
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let var_y = points
        .iter()
        .map(|p| (p.1 - mean_y) * (p.1 - mean_y))
        .sum::<f64>()
        / points.len() as f64;
    let power: f64 = points.iter().map(|p| p.1 * p.1).sum();
    let mut alias_warning = var_y <= 1e-12;
    for i in 1..n_grid.saturating_sub(1) {
        let is_local_min = grid_ssr[i] <= grid_ssr[i - 1] && grid_ssr[i] <= grid_ssr[i + 1];
        if is_local_min
            && i.abs_diff(best_idx) > 2
            && (grid_ssr[i] - grid_ssr[best_idx]).abs() <= 1e-9 * power.max(1.0)
        {
            alias_warning = true;
        }
    }

    let model = |j: f64, t: f64| {
        let m = (j * t).sin().powi(2);
        (m, t * (2.0 * j * t).sin())
    };
    let (value, stderr, iterations) = gauss_newton(points, best_idx as f64 * resolution, model)?;
    Ok(FitResult {
        value,
        stderr,
        iterations,
        alias_warning,
    })
}

fn validate_points(points: &[(f64, f64)], min_distinct: usize) -> Result<()> {
    let mut taus: Vec<f64> = points.iter().map(|p| p.0).collect();
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    taus.dedup();
    if taus.len() < min_distinct {
        return Err(Error::InvalidParams(format!(
            "need at least {min_distinct} distinct sample times, got {}",
            taus.len()
        )));
    }
    if points
        .iter()
        .any(|&(t, y)| !t.is_finite() || !y.is_finite() || t < 0.0)
    {
        return Err(Error::InvalidParams("non-finite or negative sample".into()));
    }
    Ok(())
}

/// Dissipation-rate calibration from pure-dissipation records (prepared in
/// |1>, decayed, measured in Z): fits `n1/N` against `exp(-4 Gamma tau)`.
pub fn calibrate_gamma(records: &[MeasurementRecord]) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.tau_us, r.counts.p1_hat()))
        .collect();
    fit_decay(&points)
}

/// Coupling calibration from resonant-drive records (prepared in |0>,
/// driven, measured in Z): fits `n1/N` against `sin^2(J tau)`.
pub fn calibrate_j(records: &[MeasurementRecord]) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.tau_us, r.counts.p1_hat()))
        .collect();
    fit_rabi(&points)
}

/// Default number of hold durations in a synthetic calibration data set.
pub const DEFAULT_CALIBRATION_POINTS: usize = 10;

/// Uniform calibration grid on `[0, 1/(2 Gamma)]`, i.e. out to where the
/// `exp(-4 Gamma tau)` signal has decayed to `e^-2`.
pub fn calibration_taus(gamma: f64, n_points: usize) -> Vec<f64> {
    let span = if gamma > 0.0 { 0.5 / gamma } else { 1.0 };
    (0..n_points)
        .map(|i| span * i as f64 / (n_points.max(2) - 1) as f64)
        .collect()
}

/// Synthetic pure-dissipation data set: prepare |1>, hold with loss for each
/// `tau`, measure in Z. Each record derives its own stream from
/// `cfg.rng_seed`.
pub fn dissipation_records(
    gamma: f64,
    taus: &[f64],
    cfg: &ShotConfig,
) -> Result<Vec<MeasurementRecord>> {
    cfg.validate()?;
    let nominal = SystemParams::new(0.0, gamma)?;
    taus.iter()
        .enumerate()
        .map(|(m, &tau)| {
            let mut rng = rng_from(derive_seed(cfg.rng_seed, m as u64, 0));
            let seq = PulseSequence::new(vec![PulseSegment::HoldDissipation {
                gamma,
                duration: tau,
            }]);
            let seq = apply_sequence_noise(&seq, &cfg.noise_model, &mut rng);
            let psi = seq.evolve(&QubitState::ket1());
            let counts = sample_with_rng(&psi, Basis::Z, cfg, &mut rng)?;
            Ok(MeasurementRecord {
                basis: Basis::Z,
                counts,
                tau_us: tau,
                nominal,
            })
        })
        .collect()
}

/// Synthetic resonant-drive data set: prepare |0>, drive for each `tau`,
/// measure in Z.
pub fn rabi_records(j: f64, taus: &[f64], cfg: &ShotConfig) -> Result<Vec<MeasurementRecord>> {
    cfg.validate()?;
    let nominal = SystemParams::new(j, 0.0)?;
    taus.iter()
        .enumerate()
        .map(|(m, &tau)| {
            let mut rng = rng_from(derive_seed(cfg.rng_seed, m as u64, 1));
            let seq = PulseSequence::new(vec![PulseSegment::HoldRabi { j, duration: tau }]);
            let seq = apply_sequence_noise(&seq, &cfg.noise_model, &mut rng);
            let psi = seq.evolve(&QubitState::ket0());
            let counts = sample_with_rng(&psi, Basis::Z, cfg, &mut rng)?;
            Ok(MeasurementRecord {
                basis: Basis::Z,
                counts,
                tau_us: tau,
                nominal,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Overlap measurement and the eigenvalue protocol
// ---------------------------------------------------------------------------

/// The overlap pulse program: prepare `(|0> - i|1>)/sqrt(2)` with `Rx(pi/2)`,
/// run the sandwiched anti-PT evolution for `tau`, close with `Rx(-pi/2)`.
/// The |0> population at the end equals the overlap signal `P(tau)`.
pub fn overlap_sequence(params: &SystemParams, tau: f64) -> PulseSequence {
    PulseSequence::new(vec![PulseSegment::rotation(Axis::X, FRAC_PI_2)])
        .then(compile_apt_evolution(params, tau))
        .then(PulseSequence::new(vec![PulseSegment::rotation(
            Axis::X,
            -FRAC_PI_2,
        )]))
}

/// Shot-sampled overlap estimate `n0 / n_shots`; its ideal-mode expectation
/// is [`overlap_p`].
pub fn measure_overlap_p(params: &SystemParams, tau: f64, cfg: &ShotConfig) -> Result<f64> {
    cfg.validate()?;
    let mut rng = rng_from(cfg.rng_seed);
    let seq = apply_sequence_noise(&overlap_sequence(params, tau), &cfg.noise_model, &mut rng);
    let psi = seq.evolve(&QubitState::ket0());
    let counts = sample_with_rng(&psi, Basis::Z, cfg, &mut rng)?;
    Ok(counts.p0_hat())
}

/// Recovered normalized eigenvalues at one coupling point of a sweep.
/// `e_plus`/`e_minus` are means over the successful repetitions (`None` when
/// every repetition failed); `std_real`/`std_imag` are sample standard
/// deviations of the `+` branch (zero with fewer than two repetitions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueEstimate {
    pub ratio: f64,
    pub e_plus: Option<C64>,
    pub e_minus: Option<C64>,
    pub std_real: f64,
    pub std_imag: f64,
    pub n_ok: usize,
    pub n_repeats: usize,
}

/// The eigenvalue-extraction protocol over a list of couplings at a fixed
/// nominal dissipation rate. For each `J` and each repetition:
///
/// 1. re-calibrate `Gamma` on a fresh synthetic pure-dissipation data set,
/// 2. measure the overlap at `tau0 = 1/J`,
/// 3. invert it into `omega = sqrt(J^2 - Gamma^2)`,
/// 4. form `E_±/Gamma_cal = -i ± omega/Gamma_cal`.
///
/// Repetitions are aggregated into mean and standard deviation; failed
/// calibrations or inversions are dropped, never fabricated. The `ratio`
/// axis uses the nominal values, as a real sweep would.
pub fn run_eigenvalue_protocol(
    gamma_nominal: f64,
    j_list: &[f64],
    cfg: &ShotConfig,
    n_repeats: usize,
) -> Result<Vec<EigenvalueEstimate>> {
    cfg.validate()?;
    if !gamma_nominal.is_finite() || gamma_nominal <= 0.0 || n_repeats < 1 {
        return Err(Error::InvalidParams(format!(
            "gamma = {gamma_nominal}, n_repeats = {n_repeats}: need gamma > 0 and n_repeats >= 1"
        )));
    }
    if j_list.iter().any(|j| !j.is_finite() || *j <= 0.0) {
        return Err(Error::InvalidParams("every J must be > 0".into()));
    }

    let taus = calibration_taus(gamma_nominal, DEFAULT_CALIBRATION_POINTS);
    j_list
        .iter()
        .enumerate()
        .map(|(i, &j)| {
            let params = SystemParams::new(j, gamma_nominal)?;
            let tau0 = 1.0 / j;
            let mut reps: Vec<C64> = Vec::with_capacity(n_repeats);
            for k in 0..n_repeats {
                let rep_seed = derive_seed(cfg.rng_seed, i as u64, k as u64);
                let cal_cfg = cfg.with_seed(splitmix64(rep_seed ^ 1));
                let records = dissipation_records(gamma_nominal, &taus, &cal_cfg)?;
                let gamma_cal = match calibrate_gamma(&records) {
                    Ok(fit) if fit.value > 0.0 => fit.value,
                    _ => continue,
                };
                let overlap_cfg = cfg.with_seed(splitmix64(rep_seed ^ 2));
                let p_hat = measure_overlap_p(&params, tau0, &overlap_cfg)?;
                let omega = match invert_overlap(p_hat, tau0, gamma_cal) {
                    Ok(w) => w,
                    Err(_) => continue,
                };
                reps.push(C64::new(0.0, -1.0) + omega / gamma_cal);
            }
            Ok(aggregate_estimate(j / gamma_nominal, &reps, n_repeats))
        })
        .collect()
}

/// Noiseless limit of [`run_eigenvalue_protocol`]: the calibration fit runs
/// on exact decay values and the overlap is the closed-form signal. Output
/// matches the analytic normalized eigenvalues in both regimes and at the
/// exceptional point.
pub fn run_eigenvalue_protocol_exact(
    gamma_nominal: f64,
    j_list: &[f64],
) -> Result<Vec<EigenvalueEstimate>> {
    if !gamma_nominal.is_finite() || gamma_nominal <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "gamma = {gamma_nominal}: need gamma > 0"
        )));
    }
    if j_list.iter().any(|j| !j.is_finite() || *j <= 0.0) {
        return Err(Error::InvalidParams("every J must be > 0".into()));
    }

    let taus = calibration_taus(gamma_nominal, DEFAULT_CALIBRATION_POINTS);
    let points: Vec<(f64, f64)> = taus
        .iter()
        .map(|&t| (t, dissipation_decay(gamma_nominal, t)))
        .collect();
    let gamma_cal = fit_decay(&points)?.value;

    j_list
        .iter()
        .map(|&j| {
            let params = SystemParams::new(j, gamma_nominal)?;
            let tau0 = 1.0 / j;
            let p = overlap_p(&params, tau0);
            let omega = invert_overlap(p, tau0, gamma_cal)?;
            let e_plus = C64::new(0.0, -1.0) + omega / gamma_cal;
            Ok(aggregate_estimate(j / gamma_nominal, &[e_plus], 1))
        })
        .collect()
}

fn aggregate_estimate(ratio: f64, reps: &[C64], n_repeats: usize) -> EigenvalueEstimate {
    if reps.is_empty() {
        return EigenvalueEstimate {
            ratio,
            e_plus: None,
            e_minus: None,
            std_real: 0.0,
            std_imag: 0.0,
            n_ok: 0,
            n_repeats,
        };
    }
    let n = reps.len() as f64;
    let mean = reps.iter().sum::<C64>() / n;
    let (mut var_re, mut var_im) = (0.0, 0.0);
    for e in reps {
        var_re += (e.re - mean.re) * (e.re - mean.re);
        var_im += (e.im - mean.im) * (e.im - mean.im);
    }
    let (std_real, std_imag) = if reps.len() > 1 {
        ((var_re / (n - 1.0)).sqrt(), (var_im / (n - 1.0)).sqrt())
    } else {
        (0.0, 0.0)
    };
    EigenvalueEstimate {
        ratio,
        e_plus: Some(mean),
        // The trace constraint makes the `-` branch the mirror of the mean.
        e_minus: Some(C64::new(0.0, -2.0) - mean),
        std_real,
        std_imag,
        n_ok: reps.len(),
        n_repeats,
    }
}

// ---------------------------------------------------------------------------
// Tomography and fidelity
// ---------------------------------------------------------------------------

/// Reconstructed state, its closed-form reference, and their normalized
/// fidelity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TomographyResult {
    pub rho_exp: DensityMatrix2,
    pub rho_theory: DensityMatrix2,
    pub fidelity: f64,
}

const TRACE_FLOOR: f64 = 1e-6;

/// Pauli-basis reconstruction from three batches of fractions measured after
/// the anti-PT evolution from |0>. All fractions share the per-batch shot
/// normalization, so the reconstructed matrix is sub-normalized exactly like
/// the state it estimates.
fn reconstruct(z: (f64, f64), x: (f64, f64), y: (f64, f64)) -> DensityMatrix2 {
    DensityMatrix2 {
        rho00: z.0,
        rho11: z.1,
        rho01: C64::new((x.0 - x.1) / 2.0, (y.1 - y.0) / 2.0),
    }
}

/// Shot-sampled state tomography after an anti-PT evolution of duration
/// `tau`. Measures in Z, X and Y (independent streams derived from the
/// seed), reconstructs the sub-normalized density matrix, projects it onto
/// the PSD cone, and scores it against the closed form.
pub fn tomography(params: &SystemParams, tau: f64, cfg: &ShotConfig) -> Result<TomographyResult> {
    cfg.validate()?;
    let mut fractions = [(0.0, 0.0); 3];
    for (idx, basis) in [Basis::Z, Basis::X, Basis::Y].into_iter().enumerate() {
        let mut rng = rng_from(derive_seed(cfg.rng_seed, idx as u64, 0));
        let seq = apply_sequence_noise(
            &compile_apt_evolution(params, tau),
            &cfg.noise_model,
            &mut rng,
        );
        let psi = seq.evolve(&QubitState::ket0());
        let counts = sample_with_rng(&psi, basis, cfg, &mut rng)?;
        fractions[idx] = (counts.p0_hat(), counts.p1_hat());
    }
    finish_tomography(params, tau, fractions[0], fractions[1], fractions[2])
}

/// Infinite-shot limit of [`tomography`]: the three batches of fractions are
/// the exact basis populations, so the reconstruction returns the closed
/// form and the fidelity is 1 up to rounding.
pub fn tomography_exact(params: &SystemParams, tau: f64) -> Result<TomographyResult> {
    let psi = state_closed(params, tau);
    let mut fractions = [(0.0, 0.0); 3];
    for (idx, basis) in [Basis::Z, Basis::X, Basis::Y].into_iter().enumerate() {
        let rotated = match basis.pre_rotation() {
            None => psi,
            Some((axis, angle)) => rotation(axis, angle).apply(&psi),
        };
        fractions[idx] = (rotated.amp0.norm_sqr(), rotated.amp1.norm_sqr());
    }
    finish_tomography(params, tau, fractions[0], fractions[1], fractions[2])
}

fn finish_tomography(
    params: &SystemParams,
    tau: f64,
    z: (f64, f64),
    x: (f64, f64),
    y: (f64, f64),
) -> Result<TomographyResult> {
    let raw = reconstruct(z, x, y);
    if raw.trace() <= TRACE_FLOOR {
        return Err(Error::DegenerateTrace(raw.trace()));
    }
    let rho_exp = raw.clip_to_psd();
    if rho_exp.trace() <= TRACE_FLOOR {
        return Err(Error::DegenerateTrace(rho_exp.trace()));
    }
    let rho_theory = rho_closed(params, tau);
    let fidelity = fidelity(&rho_theory, &rho_exp)?;
    Ok(TomographyResult {
        rho_exp,
        rho_theory,
        fidelity,
    })
}

/// Normalized state fidelity
///
/// ```text
/// F = |Tr(a b)| / sqrt(Tr(a^2) Tr(b^2))
/// ```
///
/// evaluated on the trace-normalized matrices, hence invariant under scaling
/// either argument by a positive constant. Clamped to [0, 1] against
/// rounding.
pub fn fidelity(a: &DensityMatrix2, b: &DensityMatrix2) -> Result<f64> {
    let an = a.normalized()?.as_mat2();
    let bn = b.normalized()?.as_mat2();
    let tr_ab = (an * bn).trace().norm();
    let tr_a2 = (an * an).trace().re;
    let tr_b2 = (bn * bn).trace().re;
    Ok((tr_ab / (tr_a2 * tr_b2).sqrt()).clamp(0.0, 1.0))
}
