// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! The closed-form density matrix and overlap signal against the
//! state-vector oracle (series propagator applied to the initial state),
//! including the exceptional-point neighborhood and continuity across it.

use aptsim::analytics::{invert_overlap, overlap_p, rho_closed};
use aptsim::{expm_series, h_apt, QubitState, SystemParams, C64};

/// Oracle: rho = U |0><0| U^dag with U from the series exponential.
fn rho_oracle(params: &SystemParams, tau: f64) -> (f64, f64, C64) {
    let u = expm_series(&h_apt(params).scale(C64::new(0.0, -tau)));
    let psi = u.apply(&QubitState::ket0());
    (
        psi.amp0.norm_sqr(),
        psi.amp1.norm_sqr(),
        psi.amp0 * psi.amp1.conj(),
    )
}

/// Oracle: P = |<psi'|U|psi>|^2 with the circular-superposition pair.
fn overlap_oracle(params: &SystemParams, tau: f64) -> f64 {
    let u = expm_series(&h_apt(params).scale(C64::new(0.0, -tau)));
    let s = 0.5f64.sqrt();
    let psi = QubitState::new(C64::new(s, 0.0), C64::new(0.0, -s));
    let out = u.apply(&psi);
    psi.inner(&out).norm_sqr()
}

fn grid_params() -> Vec<SystemParams> {
    let mut out = Vec::new();
    // Both regimes, the figure parameter sets, and the EP neighborhood at
    // relative offsets 0, 1e-8, 1e-4.
    for (j, g) in [
        (0.06, 0.004),
        (0.06, 0.03),
        (0.06, 0.53),
        (0.065, 0.022),
        (0.0, 0.1),
        (0.2, 0.0),
    ] {
        out.push(SystemParams::new(j, g).unwrap());
    }
    let g = 0.05;
    for rel in [0.0, 1e-8, 1e-4] {
        out.push(SystemParams::new(g * (1.0 + rel), g).unwrap());
        out.push(SystemParams::new(g * (1.0 - rel), g).unwrap());
    }
    out
}

#[test]
fn rho_closed_matches_oracle() {
    let mut worst = 0.0f64;
    for params in grid_params() {
        for i in 0..=40 {
            let tau = 100.0 * i as f64 / 40.0;
            let rho = rho_closed(&params, tau);
            let (o00, o11, o01) = rho_oracle(&params, tau);
            worst = worst
                .max((rho.rho00 - o00).abs())
                .max((rho.rho11 - o11).abs())
                .max((rho.rho01 - o01).norm());
        }
    }
    assert!(worst <= 1e-9, "worst entry deviation {worst:.3e}");
}

#[test]
fn overlap_matches_oracle() {
    let mut worst = 0.0f64;
    for params in grid_params() {
        // Skip very deep symmetric-regime times where cosh^2 dwarfs the
        // absolute tolerance scale; relative agreement is checked below.
        for i in 0..=40 {
            let tau = 50.0 * i as f64 / 40.0;
            let p = overlap_p(&params, tau);
            let o = overlap_oracle(&params, tau);
            worst = worst.max((p - o).abs() / o.abs().max(1.0));
        }
    }
    assert!(worst <= 1e-10, "worst relative deviation {worst:.3e}");
}

#[test]
fn closed_forms_are_continuous_across_the_transition() {
    let g = 0.05;
    for tau in [1.0, 10.0, 40.0] {
        let below = SystemParams::new(g * (1.0 - 1e-9), g).unwrap();
        let above = SystemParams::new(g * (1.0 + 1e-9), g).unwrap();
        let rb = rho_closed(&below, tau);
        let ra = rho_closed(&above, tau);
        assert!((rb.rho00 - ra.rho00).abs() <= 1e-8);
        assert!((rb.rho11 - ra.rho11).abs() <= 1e-8);
        assert!((rb.rho01 - ra.rho01).norm() <= 1e-8);
        assert!((overlap_p(&below, tau) - overlap_p(&above, tau)).abs() <= 1e-8);
    }
}

#[test]
fn trace_decays_from_one() {
    for params in grid_params() {
        let mut last = 1.0 + 1e-12;
        for i in 0..=50 {
            let tau = 60.0 * i as f64 / 50.0;
            let t = rho_closed(&params, tau).trace();
            assert!(t > 0.0 && t <= 1.0 + 1e-12);
            if params.gamma() == 0.0 {
                assert!((t - 1.0).abs() <= 1e-12);
            }
            assert!(t <= last * (1.0 + 1e-9), "trace must not grow");
            last = t;
        }
    }
}

#[test]
fn rho_matches_the_compiled_pulse_sequence() {
    // Independent of the series oracle: populations sampled from the actual
    // three-segment pulse program.
    use aptsim::pulse::compile_apt_evolution;
    let params = SystemParams::new(0.06, 0.004).unwrap();
    for i in 0..=50 {
        let tau = 100.0 * i as f64 / 50.0;
        let psi = compile_apt_evolution(&params, tau).evolve(&QubitState::ket0());
        let rho = rho_closed(&params, tau);
        assert!((rho.rho00 - psi.amp0.norm_sqr()).abs() <= 1e-9, "tau {tau}");
        assert!((rho.rho11 - psi.amp1.norm_sqr()).abs() <= 1e-9, "tau {tau}");
        assert!((rho.rho01 - psi.amp0 * psi.amp1.conj()).norm() <= 1e-9);
    }
}

#[test]
fn invert_recovers_splitting_on_a_ratio_sweep() {
    let gamma = 0.05;
    for i in 0..=18 {
        let ratio = 0.2 + 1.8 * i as f64 / 18.0;
        let j = ratio * gamma;
        let params = SystemParams::new(j, gamma).unwrap();
        let tau0 = 1.0 / j;
        let w = invert_overlap(overlap_p(&params, tau0), tau0, gamma).unwrap();
        let d = (w - params.omega()).norm();
        assert!(d <= 1e-12, "ratio {ratio}: omega off by {d:.3e}");
    }
}
