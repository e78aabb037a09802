// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Exact-size complex 2x2 linear algebra.
//!
//! Everything downstream runs on [`Mat2`] and [`QubitState`]. Two independent
//! matrix-exponential routes are provided: a closed form ([`expm_closed`])
//! and a scaling-and-squaring truncated Taylor series ([`expm_series`]) that
//! serves as an oracle for the closed form.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex64;

/// Matrix norm used throughout: the maximum absolute entry. Cheap and
/// sufficient at 2x2.
const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub fn new(a00: C64, a01: C64, a10: C64, a11: C64) -> Self {
        Mat2([[a00, a01], [a10, a11]])
    }

    pub fn zero() -> Self {
        Mat2([[ZERO, ZERO], [ZERO, ZERO]])
    }

    pub fn identity() -> Self {
        Mat2([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn diag(a: C64, b: C64) -> Self {
        Mat2([[a, ZERO], [ZERO, b]])
    }

    /// Angular momentum operator `Ix = sigma_x / 2`.
    pub fn ix() -> Self {
        Mat2::new(ZERO, C64::new(0.5, 0.0), C64::new(0.5, 0.0), ZERO)
    }

    /// Angular momentum operator `Iy = sigma_y / 2`.
    pub fn iy() -> Self {
        Mat2::new(ZERO, C64::new(0.0, -0.5), C64::new(0.0, 0.5), ZERO)
    }

    /// Angular momentum operator `Iz = sigma_z / 2`.
    pub fn iz() -> Self {
        Mat2::diag(C64::new(0.5, 0.0), C64::new(-0.5, 0.0))
    }

    /// Build `c0*I + cx*sigma_x + cy*sigma_y + cz*sigma_z`.
    pub fn from_pauli(c0: C64, cx: C64, cy: C64, cz: C64) -> Self {
        let i = C64::i();
        Mat2::new(c0 + cz, cx - i * cy, cx + i * cy, c0 - cz)
    }

    /// Decompose into Pauli coefficients `(c0, cx, cy, cz)`; inverse of
    /// [`Mat2::from_pauli`].
    pub fn to_pauli(&self) -> (C64, C64, C64, C64) {
        let m = &self.0;
        let half = C64::new(0.5, 0.0);
        let i = C64::i();
        (
            (m[0][0] + m[1][1]) * half,
            (m[0][1] + m[1][0]) * half,
            i * (m[0][1] - m[1][0]) * half,
            (m[0][0] - m[1][1]) * half,
        )
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Maximum absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn conj(&self) -> Self {
        let m = &self.0;
        Mat2::new(
            m[0][0].conj(),
            m[0][1].conj(),
            m[1][0].conj(),
            m[1][1].conj(),
        )
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.conj().transpose()
    }

    pub fn scale(&self, s: C64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    /// Apply to a column state: `M |psi>`.
    pub fn apply(&self, psi: &QubitState) -> QubitState {
        let m = &self.0;
        QubitState {
            amp0: m[0][0] * psi.amp0 + m[0][1] * psi.amp1,
            amp1: m[1][0] * psi.amp0 + m[1][1] * psi.amp1,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] + b[0][0],
            a[0][1] + b[0][1],
            a[1][0] + b[1][0],
            a[1][1] + b[1][1],
        )
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] - b[0][0],
            a[0][1] - b[0][1],
            a[1][0] - b[1][0],
            a[1][1] - b[1][1],
        )
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<C64> for Mat2 {
    type Output = Mat2;
    fn mul(self, s: C64) -> Mat2 {
        self.scale(s)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// A two-level state as a pair of complex amplitudes. Under dissipative
/// evolution from a normalized state the norm is sub-unit; the deficit is
/// lost population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub amp0: C64,
    pub amp1: C64,
}

impl QubitState {
    pub fn new(amp0: C64, amp1: C64) -> Self {
        QubitState { amp0, amp1 }
    }

    /// |0> = (1, 0)^T
    pub fn ket0() -> Self {
        QubitState::new(ONE, ZERO)
    }

    /// |1> = (0, 1)^T
    pub fn ket1() -> Self {
        QubitState::new(ZERO, ONE)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Dirac inner product `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &QubitState) -> C64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }

    pub fn scale(&self, s: C64) -> Self {
        QubitState::new(self.amp0 * s, self.amp1 * s)
    }

    /// Rescale to unit Dirac norm. Returns the zero state unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            *self
        } else {
            self.scale(C64::new(1.0 / n, 0.0))
        }
    }
}

/// Eigendecomposition of a 2x2 matrix.
///
/// `lambda1` carries the `+` branch of the quadratic formula. When
/// `degenerate` is set the two eigenvalues coalesced within tolerance and the
/// eigenvectors are not independent (the matrix may be defective); the
/// residual guarantee only applies when `degenerate` is false.
#[derive(Debug, Clone, Copy)]
pub struct EigenPair {
    pub lambda1: C64,
    pub lambda2: C64,
    pub vec1: QubitState,
    pub vec2: QubitState,
    pub degenerate: bool,
    /// Condition estimate of the eigenvector matrix, >= 1. Capped at 1e16
    /// when the eigenvectors are numerically parallel.
    pub condition: f64,
}

/// Default degeneracy tolerance: well above double-precision noise, well
/// below any physical parameter spacing used here.
pub const DEFAULT_TOL_DEGEN: f64 = 1e-9;

/// Closed-form matrix exponential.
///
/// Splits `M = c0*I + N` with `N` traceless, so `N^2 = s^2 * I` with
/// `s^2 = -det(N)`, and
///
/// ```text
/// exp(M) = exp(c0) * ( cosh(s) I + sinh(s)/s * N ).
/// ```
///
/// `cosh(s)` and `sinh(s)/s` are entire functions of `s^2`, so for
/// `|s| <= 1e-6` they are evaluated by a three-term series in `s^2`. This
/// removes the 0/0 at nilpotent `N` (the exceptional point) without any
/// branching on physics-level parameters.
pub fn expm_closed(m: &Mat2) -> Mat2 {
    let half = C64::new(0.5, 0.0);
    let c0 = m.trace() * half;
    let n = *m - Mat2::identity().scale(c0);
    let s2 = -n.det();

    let (ch, shs) = cosh_sinhc(s2);
    let prefactor = c0.exp();
    (Mat2::identity().scale(ch) + n.scale(shs)).scale(prefactor)
}

/// `(cosh(s), sinh(s)/s)` as functions of `s^2`, series for small `|s|`.
fn cosh_sinhc(s2: C64) -> (C64, C64) {
    if s2.norm() <= 1e-12 {
        // cosh(s)    = 1 + s^2/2 + s^4/24 + O(s^6)
        // sinh(s)/s  = 1 + s^2/6 + s^4/120 + O(s^6)
        let s4 = s2 * s2;
        (
            ONE + s2 * C64::new(0.5, 0.0) + s4 * C64::new(1.0 / 24.0, 0.0),
            ONE + s2 * C64::new(1.0 / 6.0, 0.0) + s4 * C64::new(1.0 / 120.0, 0.0),
        )
    } else {
        let s = s2.sqrt();
        (s.cosh(), s.sinh() / s)
    }
}

/// Matrix exponential by scaling and squaring with a truncated Taylor
/// series. Independent of [`expm_closed`]; used as its oracle.
///
/// The scaling exponent `k` is chosen so that `||M / 2^k|| <= 0.5` and the
/// series is truncated when a term's norm drops below 1e-18.
pub fn expm_series(m: &Mat2) -> Mat2 {
    let norm = m.norm_max();
    let k = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m.scale(C64::new(1.0 / 2f64.powi(k as i32), 0.0));

    let mut sum = Mat2::identity();
    let mut term = Mat2::identity();
    for n in 1..200 {
        term = (term * scaled).scale(C64::new(1.0 / n as f64, 0.0));
        sum = sum + term;
        if term.norm_max() < 1e-18 {
            break;
        }
    }

    let mut result = sum;
    for _ in 0..k {
        result = result * result;
    }
    result
}

/// Eigendecomposition via the quadratic characteristic polynomial,
/// `lambda = tr/2 +- sqrt((tr/2)^2 - det)` on the principal branch.
/// Eigenvectors are normalized under the Dirac norm.
pub fn eig2(m: &Mat2, tol_degen: f64) -> EigenPair {
    let half = C64::new(0.5, 0.0);
    let mean = m.trace() * half;
    let disc = mean * mean - m.det();
    // A -0.0 imaginary part would land the principal sqrt on the wrong side
    // of the branch cut for negative real discriminants.
    let disc = C64::new(disc.re, if disc.im == 0.0 { 0.0 } else { disc.im });
    let root = disc.sqrt();
    let lambda1 = mean + root;
    let lambda2 = mean - root;

    let degenerate = (lambda1 - lambda2).norm() <= tol_degen * m.norm_max().max(1.0);
    let vec1 = eigvec(m, lambda1);
    let vec2 = eigvec(m, lambda2);

    // Condition of V = [v1 v2] from the singular values of the Gram matrix:
    // with unit columns, sigma^2 = 1 +- |<v1|v2>|.
    let g = vec1.inner(&vec2).norm();
    let condition = if g >= 1.0 - 1e-15 {
        1e16
    } else {
        ((1.0 + g) / (1.0 - g)).sqrt()
    };

    EigenPair {
        lambda1,
        lambda2,
        vec1,
        vec2,
        degenerate,
        condition,
    }
}

/// Eigenvector of `m` for eigenvalue `lambda`: the better-conditioned of the
/// two analytic candidates, with a basis-vector fallback for diagonal input.
fn eigvec(m: &Mat2, lambda: C64) -> QubitState {
    let a = &m.0;
    let cand1 = QubitState::new(a[0][1], lambda - a[0][0]);
    let cand2 = QubitState::new(lambda - a[1][1], a[1][0]);
    let (n1, n2) = (cand1.norm_sqr(), cand2.norm_sqr());
    let best = if n1 >= n2 { cand1 } else { cand2 };
    if best.norm_sqr() == 0.0 {
        // Diagonal matrix: pick the basis vector for the nearer diagonal entry.
        if (lambda - a[0][0]).norm() <= (lambda - a[1][1]).norm() {
            QubitState::ket0()
        } else {
            QubitState::ket1()
        }
    } else {
        best.normalized()
    }
}
