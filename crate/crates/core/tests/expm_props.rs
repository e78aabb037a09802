// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Cross-validation of the two matrix-exponential routes and the
//! eigendecomposition against each other and against algebraic identities.

use aptsim::{eig2, expm_closed, expm_series, Mat2, QubitState, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn norm_diff(a: &Mat2, b: &Mat2) -> f64 {
    (*a - *b).norm_max()
}

/// Complex number uniform in the unit disk.
fn disk(rng: &mut ChaCha12Rng) -> C64 {
    let r = rng.random::<f64>().sqrt();
    let phi = rng.random::<f64>() * std::f64::consts::TAU;
    C64::from_polar(r, phi)
}

#[test]
fn closed_and_series_agree_on_unit_disk_entries() {
    let mut rng = ChaCha12Rng::seed_from_u64(0x5eed);
    for i in 0..1000 {
        let m = Mat2::new(
            disk(&mut rng),
            disk(&mut rng),
            disk(&mut rng),
            disk(&mut rng),
        );
        let d = norm_diff(&expm_closed(&m), &expm_series(&m));
        assert!(d <= 1e-10, "sample {i}: routes differ by {d:.3e}");
    }
}

#[test]
fn closed_and_series_agree_near_nilpotent() {
    // Traceless generators with s^2 swept through the series window.
    for log_eps in [-18, -14, -12, -10, -8, -6, -4] {
        let eps = 10f64.powi(log_eps);
        let m = Mat2::new(
            C64::new(0.0, eps),
            C64::new(1.0, 0.0),
            C64::new(eps * eps, 0.0),
            C64::new(0.0, -eps),
        );
        let d = norm_diff(&expm_closed(&m), &expm_series(&m));
        assert!(d <= 1e-12, "eps = 1e{log_eps}: {d:.3e}");
    }
}

fn mat_strategy(limit: f64) -> impl Strategy<Value = Mat2> {
    let c = move || (-limit..limit, -limit..limit).prop_map(|(re, im)| C64::new(re, im));
    (c(), c(), c(), c()).prop_map(|(a, b, cc, d)| Mat2::new(a, b, cc, d))
}

proptest! {
    #[test]
    fn cross_oracle_bounded_norm(m in mat_strategy(2.5)) {
        prop_assert!(norm_diff(&expm_closed(&m), &expm_series(&m)) <= 1e-10);
    }

    #[test]
    fn group_law_same_generator(m in mat_strategy(0.8), t1 in 0.0..3.0f64, t2 in 0.0..3.0f64) {
        let whole = expm_closed(&m.scale(C64::new(t1 + t2, 0.0)));
        let split = expm_closed(&m.scale(C64::new(t1, 0.0)))
            * expm_closed(&m.scale(C64::new(t2, 0.0)));
        prop_assert!(norm_diff(&whole, &split) <= 1e-10);
    }

    #[test]
    fn determinant_is_exp_trace(m in mat_strategy(2.0)) {
        let det = expm_closed(&m).det();
        let want = m.trace().exp();
        prop_assert!((det - want).norm() <= 1e-10 * want.norm().max(1.0));
    }

    #[test]
    fn eig_residuals_when_not_degenerate(m in mat_strategy(2.0)) {
        let e = eig2(&m, 1e-9);
        if !e.degenerate {
            for (l, v) in [(e.lambda1, e.vec1), (e.lambda2, e.vec2)] {
                let mv = m.apply(&v);
                let r = QubitState::new(mv.amp0 - l * v.amp0, mv.amp1 - l * v.amp1).norm();
                prop_assert!(r <= 1e-10 * m.norm_max().max(1e-300));
            }
            prop_assert!(e.condition >= 1.0);
        }
    }

    #[test]
    fn eigenvalues_solve_characteristic_polynomial(m in mat_strategy(2.0)) {
        let e = eig2(&m, 1e-9);
        // lambda1 + lambda2 = tr, lambda1 * lambda2 = det
        prop_assert!((e.lambda1 + e.lambda2 - m.trace()).norm() <= 1e-12 * m.norm_max().max(1.0));
        let scale = m.norm_max().max(1.0);
        prop_assert!((e.lambda1 * e.lambda2 - m.det()).norm() <= 1e-11 * scale * scale);
    }
}
