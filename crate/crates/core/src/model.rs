// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! System parameters, the two Hamiltonians, and the symmetry operations.
//!
//! The anti-PT-symmetric Hamiltonian of interest is
//!
//! ```text
//! H_APT = -2J Iz + 2i Gamma Ix - i Gamma I
//!       = [[-J - iG,  iG],
//!          [     iG,  J - iG]]
//! ```
//!
//! and is realized experimentally through the passive coupling-plus-loss
//! Hamiltonian
//!
//! ```text
//! H_M = 2i Gamma Iz + 2J Ix - i Gamma I
//!     = [[0,  J],
//!        [J, -2iG]]
//! ```
//!
//! i.e. a coherent drive of strength `J` plus a pure population loss on |1>
//! at rate `4*Gamma`. Parity is `P = 2Ix` and time reversal is complex
//! conjugation; the combined antilinear map acts on operators as
//! `K(M) = P conj(M) P`.

use crate::error::{Error, Result};
use crate::linalg::{Mat2, C64};
use serde::{Deserialize, Serialize};

/// Relative tolerance for classifying a parameter point as the exceptional
/// point. Protocol-level code treats `Exceptional` via analytic limits and
/// never divides by omega.
pub const TOL_EP: f64 = 1e-9;

/// Spectral phase of the anti-PT Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `J < Gamma`: purely imaginary eigenvalues.
    AptSymmetric,
    /// `|J - Gamma|` within [`TOL_EP`]: eigenvalues and eigenvectors coalesce.
    Exceptional,
    /// `J > Gamma`: eigenvalues acquire real parts.
    AptBroken,
}

/// Coupling strength `J` and dissipation parameter `Gamma` (both angular
/// frequencies in 1/us; the population loss rate on |1> is `4*Gamma`),
/// together with the derived splitting `omega = sqrt(J^2 - Gamma^2)` and the
/// regime tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    j: f64,
    gamma: f64,
    #[serde(skip)]
    omega: C64,
    #[serde(skip, default = "default_regime")]
    regime: Regime,
}

fn default_regime() -> Regime {
    Regime::Exceptional
}

impl SystemParams {
    /// Validates `J >= 0`, `Gamma >= 0`, both finite.
    pub fn new(j: f64, gamma: f64) -> Result<Self> {
        if !j.is_finite() || !gamma.is_finite() || j < 0.0 || gamma < 0.0 {
            return Err(Error::InvalidParams(format!(
                "J = {j}, gamma = {gamma}: need finite non-negative values"
            )));
        }
        let omega_sq = j * j - gamma * gamma;
        let omega = if omega_sq >= 0.0 {
            C64::new(omega_sq.sqrt(), 0.0)
        } else {
            C64::new(0.0, (-omega_sq).sqrt())
        };
        let regime = if (j - gamma).abs() <= TOL_EP * j.max(gamma) {
            Regime::Exceptional
        } else if j < gamma {
            Regime::AptSymmetric
        } else {
            Regime::AptBroken
        };
        Ok(SystemParams {
            j,
            gamma,
            omega,
            regime,
        })
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `sqrt(J^2 - Gamma^2)` on the principal branch: real non-negative for
    /// `J >= Gamma`, positive imaginary for `J < Gamma`.
    pub fn omega(&self) -> C64 {
        self.omega
    }

    /// Signed `omega^2 = J^2 - Gamma^2`, the branch-free quantity all
    /// closed-form evaluations work with.
    pub fn omega_sq(&self) -> f64 {
        self.j * self.j - self.gamma * self.gamma
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// `J / Gamma`; infinite when `Gamma = 0`.
    pub fn ratio(&self) -> f64 {
        self.j / self.gamma
    }
}

/// The parity operator and the antilinear PT map it generates.
///
/// Represented concretely: `P = 2Ix` (so `P^2 = I` exactly) and
/// `pt_map(M) = P conj(M) P`, which is directly testable.
#[derive(Debug, Clone, Copy)]
pub struct SymmetryOps {
    pub parity: Mat2,
}

impl SymmetryOps {
    pub fn new() -> Self {
        SymmetryOps {
            parity: Mat2::ix().scale(C64::new(2.0, 0.0)),
        }
    }

    /// The antilinear PT conjugation on operators, `K(M) = P conj(M) P`.
    pub fn pt_map(&self, m: &Mat2) -> Mat2 {
        self.parity * m.conj() * self.parity
    }
}

impl Default for SymmetryOps {
    fn default() -> Self {
        SymmetryOps::new()
    }
}

/// The anti-PT-symmetric Hamiltonian `-2J Iz + 2i Gamma Ix - i Gamma I`.
pub fn h_apt(params: &SystemParams) -> Mat2 {
    let (j, g) = (params.j(), params.gamma());
    Mat2::new(
        C64::new(-j, -g),
        C64::new(0.0, g),
        C64::new(0.0, g),
        C64::new(j, -g),
    )
}

/// The passive coupling-plus-loss Hamiltonian `2i Gamma Iz + 2J Ix - i Gamma I`.
pub fn h_m(params: &SystemParams) -> Mat2 {
    let (j, g) = (params.j(), params.gamma());
    Mat2::new(
        C64::new(0.0, 0.0),
        C64::new(j, 0.0),
        C64::new(j, 0.0),
        C64::new(0.0, -2.0 * g),
    )
}

/// Anti-PT defect `||K(H) + H||`: zero iff `H` anticommutes with PT.
pub fn anti_pt_defect(h: &Mat2) -> f64 {
    let k = SymmetryOps::new().pt_map(h);
    (k + *h).norm_max()
}

/// PT defect `||K(H) - H||`: zero iff `H` commutes with PT.
///
/// Note that `h_m` itself carries the overall loss offset `-i Gamma I`,
/// which is odd under the antilinear map, so its PT defect is `2*Gamma`
/// rather than zero; the offset-free part `h_m + i Gamma I` is PT-symmetric
/// exactly. That is what "passive" means here.
pub fn pt_defect(h: &Mat2) -> f64 {
    let k = SymmetryOps::new().pt_map(h);
    (k - *h).norm_max()
}

/// Unnormalized eigenvalues `E_± = -i Gamma ± sqrt(J^2 - Gamma^2)` of the
/// anti-PT Hamiltonian; the first element carries the `+` branch.
pub fn eigenvalues_apt(params: &SystemParams) -> (C64, C64) {
    let base = C64::new(0.0, -params.gamma());
    (base + params.omega(), base - params.omega())
}

/// Normalized eigenvalues `E_± / Gamma = -i ± sqrt(J^2 - Gamma^2) / Gamma`.
///
/// Purely imaginary pair for `J < Gamma`, both `-i` at the exceptional
/// point, real part `±sqrt(J^2-Gamma^2)/Gamma` with imaginary part `-1`
/// for `J > Gamma`. Fails with [`Error::ZeroDissipation`] when `Gamma = 0`.
pub fn eigenvalues_apt_normalized(params: &SystemParams) -> Result<(C64, C64)> {
    if params.gamma() == 0.0 {
        return Err(Error::ZeroDissipation);
    }
    let (ep, em) = eigenvalues_apt(params);
    let inv = C64::new(1.0 / params.gamma(), 0.0);
    Ok((ep * inv, em * inv))
}
