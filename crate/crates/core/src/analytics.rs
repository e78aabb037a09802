// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form time-domain predictions for the anti-PT evolution from |0>,
//! and the inverse map from a measured overlap back to the eigenvalue
//! splitting.
//!
//! All formulas are evaluated through the signed invariant
//! `omega^2 = J^2 - Gamma^2`, never through `omega` itself, so both regimes
//! and the exceptional point share one code path:
//!
//! - `J > Gamma`: `cos(w t)`, `sin(w t)/w` with real `w`
//! - `J < Gamma`: `cosh(k t)`, `sinh(k t)/k` with `k = sqrt(Gamma^2 - J^2)`
//! - `|w t| <= 1e-6`: three-term series in `w^2 t^2` (entire functions)

use crate::error::{Error, Result};
use crate::linalg::{Mat2, QubitState, C64};
use crate::model::SystemParams;
use serde::{Deserialize, Serialize};

/// Branch-safe evaluation of `(cos(w*tau), sin(w*tau)/w)` where
/// `w = sqrt(omega_sq)` may be real or imaginary. Both values are real in
/// either case; the second reduces to `tau` as `w -> 0`.
pub fn cos_sinc(omega_sq: f64, tau: f64) -> (f64, f64) {
    let x = omega_sq * tau * tau; // (w*tau)^2, signed
    if x.abs() <= 1e-12 {
        // cos:      1 - x/2 + x^2/24
        // sin(wt)/w: tau * (1 - x/6 + x^2/120)
        (
            1.0 - x / 2.0 + x * x / 24.0,
            tau * (1.0 - x / 6.0 + x * x / 120.0),
        )
    } else if omega_sq > 0.0 {
        let w = omega_sq.sqrt();
        ((w * tau).cos(), (w * tau).sin() / w)
    } else {
        let k = (-omega_sq).sqrt();
        ((k * tau).cosh(), (k * tau).sinh() / k)
    }
}

/// State reached from |0> after an anti-PT evolution of duration `tau`:
///
/// ```text
/// amp0 = e^{-G tau} (cos(w tau) + i J sin(w tau)/w)
/// amp1 = e^{-G tau} G sin(w tau)/w
/// ```
pub fn state_closed(params: &SystemParams, tau: f64) -> QubitState {
    let (c, s) = cos_sinc(params.omega_sq(), tau);
    let decay = (-params.gamma() * tau).exp();
    QubitState::new(
        C64::new(c, params.j() * s) * decay,
        C64::new(params.gamma() * s * decay, 0.0),
    )
}

/// A Hermitian 2x2 density matrix, possibly sub-normalized (trace <= 1);
/// `rho10` is implicitly `conj(rho01)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix2 {
    pub rho00: f64,
    pub rho11: f64,
    pub rho01: C64,
}

impl DensityMatrix2 {
    pub fn from_pure(psi: &QubitState) -> Self {
        DensityMatrix2 {
            rho00: psi.amp0.norm_sqr(),
            rho11: psi.amp1.norm_sqr(),
            rho01: psi.amp0 * psi.amp1.conj(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11
    }

    pub fn rho10(&self) -> C64 {
        self.rho01.conj()
    }

    pub fn as_mat2(&self) -> Mat2 {
        Mat2::new(
            C64::new(self.rho00, 0.0),
            self.rho01,
            self.rho01.conj(),
            C64::new(self.rho11, 0.0),
        )
    }

    /// Real eigenvalues `(lo, hi)` of the Hermitian matrix.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.rho00 + self.rho11);
        let d = 0.5 * (self.rho00 - self.rho11);
        let r = (d * d + self.rho01.norm_sqr()).sqrt();
        (mean - r, mean + r)
    }

    /// Nearest positive-semidefinite matrix in Frobenius norm: clip negative
    /// eigenvalues to zero.
    pub fn clip_to_psd(&self) -> Self {
        let (lo, hi) = self.eigenvalues();
        if lo >= 0.0 {
            return *self;
        }
        if hi <= 0.0 {
            return DensityMatrix2 {
                rho00: 0.0,
                rho11: 0.0,
                rho01: C64::new(0.0, 0.0),
            };
        }
        // Keep only the hi-eigenvalue projector.
        let a = self.rho00;
        let c = self.rho11;
        let b = self.rho01;
        // Eigenvector for hi: the better-conditioned analytic candidate.
        let v = if (hi - a).abs() >= (hi - c).abs() {
            QubitState::new(C64::new(hi - c, 0.0), b.conj())
        } else {
            QubitState::new(b, C64::new(hi - a, 0.0))
        };
        let v = v.normalized();
        DensityMatrix2 {
            rho00: hi * v.amp0.norm_sqr(),
            rho11: hi * v.amp1.norm_sqr(),
            rho01: v.amp0 * v.amp1.conj() * hi,
        }
    }

    /// Trace-normalized copy. Fails when the trace is not positive.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 || !t.is_finite() {
            return Err(Error::DegenerateTrace(t));
        }
        Ok(DensityMatrix2 {
            rho00: self.rho00 / t,
            rho11: self.rho11 / t,
            rho01: self.rho01 / t,
        })
    }
}

/// Closed-form density matrix of the anti-PT evolution from |0>:
///
/// ```text
/// rho00 = e^{-2G tau} [ cos^2(w tau) + (J sin(w tau)/w)^2 ]
/// rho11 = e^{-2G tau} G^2 sin^2(w tau) / w^2
/// rho01 = amp0 * conj(amp1)
/// ```
///
/// The off-diagonal is built from the amplitude product of [`state_closed`]
/// rather than a separately transcribed expression, which keeps its branch
/// convention consistent with the populations by construction.
pub fn rho_closed(params: &SystemParams, tau: f64) -> DensityMatrix2 {
    DensityMatrix2::from_pure(&state_closed(params, tau))
}

/// Overlap signal
///
/// ```text
/// P(tau) = |<psi'| e^{-i H_APT tau} |psi>|^2 = cos^2(w tau) e^{-2 G tau}
/// ```
///
/// with `|psi> = (|0> - i|1>)/sqrt(2)` and `<psi'| = (<0| + i<1|)/sqrt(2)`.
pub fn overlap_p(params: &SystemParams, tau: f64) -> f64 {
    let (c, _) = cos_sinc(params.omega_sq(), tau);
    c * c * (-2.0 * params.gamma() * tau).exp()
}

/// Population left on |1> after a pure-dissipation hold from |1>:
/// `exp(-4 Gamma tau)`.
pub fn dissipation_decay(gamma: f64, tau: f64) -> f64 {
    (-4.0 * gamma * tau).exp()
}

/// Dead zone of the overlap inversion around the exceptional point, in
/// `|ln q|`. The map `q -> omega` has unbounded derivative at `q = 1`, so
/// rounding in the calibrated `Gamma` (amplified by `tau0`) must be absorbed
/// here; values this close to `q = 1` are reported as exactly at the
/// exceptional point. The corresponding blind spot in `omega` is
/// `sqrt(2e-11)/tau0`, far below any physically resolvable splitting.
const EP_CLAMP_LN_Q: f64 = 1e-11;

/// Invert a measured overlap into the eigenvalue splitting estimate.
///
/// With `q = sqrt(P e^{2 Gamma tau0})`:
///
/// - `q < 1`: `omega = arccos(q)/tau0` (real; broken regime)
/// - `q > 1`: `omega = i arccosh(q)/tau0` (imaginary; symmetric regime)
/// - `q = 1` (within the clamp): `omega = 0` (exceptional point)
///
/// Principal branches throughout; unambiguous when the caller keeps
/// `|omega| tau0 < pi/2`, which the measurement protocol guarantees by
/// choosing `tau0 = 1/J`. Larger `tau0` aliases into the principal branch.
pub fn invert_overlap(p: f64, tau0: f64, gamma: f64) -> Result<C64> {
    if !tau0.is_finite() || tau0 <= 0.0 || !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidParams(format!(
            "tau0 = {tau0}, gamma = {gamma}: need tau0 > 0 and gamma >= 0"
        )));
    }
    if !p.is_finite() || p <= 0.0 {
        return Err(Error::InvalidOverlap(p));
    }
    let ln_q = 0.5 * p.ln() + gamma * tau0;
    if !ln_q.is_finite() {
        return Err(Error::InvalidOverlap(p));
    }
    if ln_q.abs() <= EP_CLAMP_LN_Q {
        return Ok(C64::new(0.0, 0.0));
    }
    if ln_q < 0.0 {
        Ok(C64::new(ln_q.exp().acos() / tau0, 0.0))
    } else {
        Ok(C64::new(0.0, ln_q.exp().acosh() / tau0))
    }
}
