// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Numerical toolkit for a dissipative two-level system governed by an
//! anti-PT-symmetric Hamiltonian.
//!
//! The crate is organized in layers:
//!
//! - [`linalg`]: exact 2x2 complex matrix arithmetic, eigendecomposition,
//!   and two independent matrix-exponential routes used to cross-check
//!   everything above them.
//! - [`model`]: the Hamiltonians `H_APT` and `H_M`, the parity/time-reversal
//!   symmetry operations, and the analytic eigenvalue formula with regime
//!   classification (symmetric / exceptional point / broken).
//! - [`pulse`]: pulse segments and sequences, including the three-segment
//!   sandwich that turns an `H_M` hold into an `H_APT` evolution.
//! - [`analytics`]: closed-form density-matrix elements and the state-overlap
//!   signal, evaluated branch-safely in both regimes and at the exceptional
//!   point, plus the inverse map from overlap to eigenvalue splitting.
//! - [`cpt`]: the C operator, the CPT inner product, and non-Hermitian
//!   Bloch-sphere coordinates with trajectory generation under `H_M`.
//! - [`lab`]: a simulated experiment layer with shot-noise sampling,
//!   calibration fits, the eigenvalue-extraction protocol, and state
//!   tomography with a normalized fidelity metric.
//!
//! Units: couplings and rates (`J`, `Gamma`, eigenvalues) are angular
//! frequencies in 1/us; times are in us. All arguments enter formulas as
//! dimensionless products such as `J * tau`.

pub mod analytics;
pub mod cpt;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod model;
pub mod pulse;

pub use error::{Error, Result};
pub use linalg::{eig2, expm_closed, expm_series, EigenPair, Mat2, QubitState, C64};
pub use model::{
    anti_pt_defect, eigenvalues_apt, eigenvalues_apt_normalized, h_apt, h_m, pt_defect, Regime,
    SymmetryOps, SystemParams,
};
