// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pulse segments, sequences, and the sandwich construction.
//!
//! Conventions, fixed once for the whole crate:
//!
//! | item | meaning |
//! |------|---------|
//! | `Rotation { axis: a, angle: t }` | propagator `exp(-i t Ia)` (so `y, -pi/2` is the "-y axis pi/2 pulse") |
//! | list order | temporal order: the first segment acts on the state first |
//! | sequence propagator | reverse-order matrix product `U_n ... U_2 U_1` |
//!
//! Rotations are ideal (instantaneous); finite-duration pulse errors belong
//! to the noise models of the lab layer, not here.

use crate::error::{Error, Result};
use crate::linalg::{expm_closed, Mat2, QubitState, C64};
use crate::model::SystemParams;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn generator(&self) -> Mat2 {
        match self {
            Axis::X => Mat2::ix(),
            Axis::Y => Mat2::iy(),
            Axis::Z => Mat2::iz(),
        }
    }
}

/// One step of a pulse program. Durations are in us, angles in rad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PulseSegment {
    /// Ideal rotation `exp(-i * angle * I_axis)`.
    Rotation { axis: Axis, angle: f64 },
    /// Coupled-dissipative hold: evolution under `H_M(j, gamma)`.
    HoldHm { j: f64, gamma: f64, duration: f64 },
    /// Pure loss on |1> at rate `4*gamma`: propagator `diag(1, exp(-2*gamma*t))`.
    HoldDissipation { gamma: f64, duration: f64 },
    /// Resonant drive `exp(-i * 2 j Ix * t)`.
    HoldRabi { j: f64, duration: f64 },
}

impl PulseSegment {
    pub fn rotation(axis: Axis, angle: f64) -> Self {
        PulseSegment::Rotation { axis, angle }
    }

    pub fn hold_hm(params: &SystemParams, duration: f64) -> Self {
        PulseSegment::HoldHm {
            j: params.j(),
            gamma: params.gamma(),
            duration,
        }
    }

    /// Segment parameters must be finite, with non-negative duration.
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PulseSegment::Rotation { angle, .. } => angle.is_finite(),
            PulseSegment::HoldHm { j, gamma, duration } => {
                j.is_finite() && gamma.is_finite() && duration.is_finite() && duration >= 0.0
            }
            PulseSegment::HoldDissipation { gamma, duration } => {
                gamma.is_finite() && duration.is_finite() && duration >= 0.0
            }
            PulseSegment::HoldRabi { j, duration } => {
                j.is_finite() && duration.is_finite() && duration >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("invalid segment {self:?}")))
        }
    }
}

/// Propagator of a single segment.
pub fn segment_propagator(seg: &PulseSegment) -> Mat2 {
    match *seg {
        PulseSegment::Rotation { axis, angle } => rotation(axis, angle),
        PulseSegment::HoldHm { j, gamma, duration } => {
            let h = Mat2::new(
                C64::new(0.0, 0.0),
                C64::new(j, 0.0),
                C64::new(j, 0.0),
                C64::new(0.0, -2.0 * gamma),
            );
            expm_closed(&h.scale(C64::new(0.0, -duration)))
        }
        PulseSegment::HoldDissipation { gamma, duration } => Mat2::diag(
            C64::new(1.0, 0.0),
            C64::new((-2.0 * gamma * duration).exp(), 0.0),
        ),
        PulseSegment::HoldRabi { j, duration } => rotation(Axis::X, 2.0 * j * duration),
    }
}

/// Rotation propagator `exp(-i * angle * I_axis)`.
pub fn rotation(axis: Axis, angle: f64) -> Mat2 {
    expm_closed(&axis.generator().scale(C64::new(0.0, -angle)))
}

/// An ordered pulse program; list order is temporal order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PulseSequence {
    pub segments: Vec<PulseSegment>,
}

impl PulseSequence {
    pub fn new(segments: Vec<PulseSegment>) -> Self {
        PulseSequence { segments }
    }

    pub fn empty() -> Self {
        PulseSequence::default()
    }

    pub fn push(&mut self, seg: PulseSegment) {
        self.segments.push(seg);
    }

    /// Concatenate: `self` runs first, then `other`.
    pub fn then(mut self, other: PulseSequence) -> Self {
        self.segments.extend(other.segments);
        self
    }

    /// Total propagator, the reverse-order product of segment propagators.
    /// The empty sequence gives the identity.
    pub fn propagator(&self) -> Mat2 {
        self.segments
            .iter()
            .fold(Mat2::identity(), |acc, seg| segment_propagator(seg) * acc)
    }

    /// Apply the sequence to a state, segment by segment.
    pub fn evolve(&self, psi0: &QubitState) -> QubitState {
        self.segments
            .iter()
            .fold(*psi0, |psi, seg| segment_propagator(seg).apply(&psi))
    }

    pub fn validate(&self) -> Result<()> {
        self.segments.iter().try_for_each(PulseSegment::validate)
    }

    /// Serialize to the JSON wire form: an array of
    /// `{kind, axis?, angle?, j?, gamma?, duration?}` objects, lossless at
    /// full double precision.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pulse sequence serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let seq: PulseSequence = serde_json::from_str(s)
            .map_err(|e| Error::InvalidParams(format!("bad sequence JSON: {e}")))?;
        seq.validate()?;
        Ok(seq)
    }
}

/// The three-segment sandwich realizing an anti-PT evolution:
///
/// ```text
/// Ry(pi/2) exp(-i H_M tau) Ry(-pi/2) = exp(-i H_APT tau)
/// ```
///
/// Returned in temporal order `[Ry(-pi/2), hold H_M for tau, Ry(+pi/2)]`, so
/// the sequence propagator equals `exp(-i * h_apt * tau)`.
pub fn compile_apt_evolution(params: &SystemParams, tau: f64) -> PulseSequence {
    use std::f64::consts::FRAC_PI_2;
    PulseSequence::new(vec![
        PulseSegment::rotation(Axis::Y, -FRAC_PI_2),
        PulseSegment::hold_hm(params, tau),
        PulseSegment::rotation(Axis::Y, FRAC_PI_2),
    ])
}
