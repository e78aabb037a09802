// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical parameter was negative or non-finite.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Normalized eigenvalues `E/Gamma` are undefined at `Gamma = 0`.
    #[error("normalized eigenvalues undefined: gamma = 0")]
    ZeroDissipation,

    /// The measured overlap cannot be inverted (non-positive or non-finite).
    #[error("invalid overlap value: {0}")]
    InvalidOverlap(f64),

    /// CPT construction requested outside its domain of validity `r < 1`.
    #[error("CPT frame undefined for r = gamma/J = {0} (requires r < 1)")]
    InvalidRegime(f64),

    /// Bloch coordinates of the zero state are undefined.
    #[error("zero state has no Bloch coordinates")]
    ZeroState,

    /// A state handed to the measurement layer has norm above unity.
    #[error("state norm^2 = {0} exceeds 1")]
    InvalidState(f64),

    /// A least-squares refinement failed to reduce the residual.
    #[error("fit diverged after {0} damped steps without improvement")]
    FitDiverged(usize),

    /// All population was lost; no state can be reconstructed.
    #[error("degenerate trace {0}: all population lost")]
    DegenerateTrace(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
