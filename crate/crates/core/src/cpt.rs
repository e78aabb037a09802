// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! The C operator, the CPT inner product, and non-Hermitian Bloch
//! coordinates for states evolving under `H_M`.
//!
//! For `r = Gamma/J < 1` the operator
//!
//! ```text
//! C = 2/sqrt(1 - r^2) (Ix + i r Iz)
//! ```
//!
//! satisfies `C^2 = I`, `[H_M, C] = 0` and `[PT, C] = 0`, and the inner
//! product `<phi|psi>_CPT = conj(phi)^T P^T C^T psi` makes the two
//! eigenstates `|eps_+>`, `|eps_->` of `H_M` orthonormal. A state expanded
//! as `c_+ |eps_+> + c_- |eps_->` then lives on a sphere of radius
//! `R = sqrt(|c_+|^2 + |c_-|^2)` with polar angle `Theta = 2 atan2(|c_-|,
//! |c_+|)` and azimuth `Phi = arg(c_-) - arg(c_+)`.
//!
//! At `r >= 1` the square root turns imaginary and the inner product loses
//! positivity; [`CptFrame::new`] refuses that regime. The opt-in
//! [`CptFrame::new_with_continuation`] evaluates the same algebra anyway
//! (principal branches) for qualitative plots, flagged as non-physical via
//! [`CptFrame::regime_valid`]. Note that under this continuation the PT
//! commutation of C flips sign (`K(C) = -C` for `r > 1`), so only `C^2 = I`
//! and `[H_M, C] = 0` survive as identities there.

use crate::error::{Error, Result};
use crate::linalg::{expm_closed, Mat2, QubitState, C64};
use crate::model::{h_m, SystemParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::{self, Write};

/// CPT structure for a given `(J, Gamma)`: the C operator, the metric
/// `P^T C^T` of the inner product, and the CPT-normalized eigenstates.
#[derive(Debug, Clone)]
pub struct CptFrame {
    params: SystemParams,
    r: f64,
    c_op: Mat2,
    metric: Mat2,
    eps_plus: QubitState,
    eps_minus: QubitState,
    regime_valid: bool,
}

impl CptFrame {
    /// Build the frame for `r = Gamma/J < 1`. Fails with
    /// [`Error::InvalidRegime`] outside that domain (including `J = 0`).
    pub fn new(params: &SystemParams) -> Result<Self> {
        let r = params.gamma() / params.j();
        if r.is_nan() || r >= 1.0 {
            return Err(Error::InvalidRegime(r));
        }
        Self::build(params, r)
    }

    /// Build the frame for `r > 1` by analytic continuation (principal
    /// branch of `sqrt(1 - r^2)`). Coordinates computed from such a frame
    /// are tagged non-physical through [`CptFrame::regime_valid`]. The
    /// exceptional point itself stays rejected: C diverges there.
    pub fn new_with_continuation(params: &SystemParams) -> Result<Self> {
        let r = params.gamma() / params.j();
        if !r.is_finite() || (r - 1.0).abs() <= 1e-9 {
            return Err(Error::InvalidRegime(r));
        }
        Self::build(params, r)
    }

    fn build(params: &SystemParams, r: f64) -> Result<Self> {
        let inv_root = C64::new(1.0, 0.0) / C64::new(1.0 - r * r, 0.0).sqrt();
        // C = (sigma_x + i r sigma_z) / sqrt(1 - r^2)
        let c_op = Mat2::new(
            C64::new(0.0, r),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, -r),
        )
        .scale(inv_root);
        // P^T C^T with P = sigma_x; both factors are symmetric.
        let parity = Mat2::ix().scale(C64::new(2.0, 0.0));
        let metric = parity * c_op;

        // Eigenvectors of H_M for E_± = -i Gamma ± omega, as (J, E_±)^T.
        // The principal-branch omega makes the `+` label the larger real
        // part below the transition and the slower-decaying branch above it.
        let base = C64::new(0.0, -params.gamma());
        let e_plus = base + params.omega();
        let e_minus = base - params.omega();
        let v_plus = QubitState::new(C64::new(params.j(), 0.0), e_plus);
        let v_minus = QubitState::new(C64::new(params.j(), 0.0), e_minus);

        // Both raw eigenvectors (J, E_±) have the closed-form CPT norm
        // <v|v>_CPT = 2 omega^2 / sqrt(1 - r^2); positive for r < 1, and the
        // analytic continuation of that expression elsewhere. Normalizing
        // through the closed form instead of the numeric pairing keeps the
        // continuation usable at r > 1, where the continued eigenstates are
        // self-orthogonal under the sesquilinear pairing itself.
        let n2 = C64::new(2.0 * params.omega_sq(), 0.0) * inv_root;
        if n2.norm() <= 1e-14 * v_plus.norm_sqr() {
            return Err(Error::InvalidRegime(r));
        }
        let inv_norm = C64::new(1.0, 0.0) / n2.sqrt();
        let eps_plus = v_plus.scale(inv_norm);
        let eps_minus = v_minus.scale(inv_norm);

        Ok(CptFrame {
            params: *params,
            r,
            c_op,
            metric,
            eps_plus,
            eps_minus,
            regime_valid: r < 1.0,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// `r = Gamma / J`.
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn c_op(&self) -> &Mat2 {
        &self.c_op
    }

    /// True iff the frame sits in the `r < 1` domain where the CPT inner
    /// product is positive definite.
    pub fn regime_valid(&self) -> bool {
        self.regime_valid
    }

    pub fn eps_plus(&self) -> &QubitState {
        &self.eps_plus
    }

    pub fn eps_minus(&self) -> &QubitState {
        &self.eps_minus
    }

    /// CPT inner product `<phi|psi>_CPT`, antilinear in `phi`.
    pub fn cpt_inner(&self, phi: &QubitState, psi: &QubitState) -> C64 {
        phi.inner(&self.metric.apply(psi))
    }

    /// Expansion coefficients `(c_+, c_-)` of `psi` over the CPT-normalized
    /// eigenstates. In the physical regime these are the CPT projections
    /// `<eps_±|psi>_CPT`; under analytic continuation (where the pairing is
    /// no longer positive) the unique expansion is obtained by solving the
    /// 2x2 eigenbasis system directly.
    pub fn coefficients(&self, psi: &QubitState) -> (C64, C64) {
        if self.regime_valid {
            (
                self.cpt_inner(&self.eps_plus, psi),
                self.cpt_inner(&self.eps_minus, psi),
            )
        } else {
            let det =
                self.eps_plus.amp0 * self.eps_minus.amp1 - self.eps_minus.amp0 * self.eps_plus.amp1;
            (
                (psi.amp0 * self.eps_minus.amp1 - self.eps_minus.amp0 * psi.amp1) / det,
                (self.eps_plus.amp0 * psi.amp1 - psi.amp0 * self.eps_plus.amp1) / det,
            )
        }
    }

    /// Bloch coordinates of a state. `Phi = 0` by convention at the poles.
    pub fn to_bloch(&self, psi: &QubitState) -> Result<BlochPoint> {
        if psi.norm_sqr() == 0.0 {
            return Err(Error::ZeroState);
        }
        let (cp, cm) = self.coefficients(psi);
        let (ap, am) = (cp.norm(), cm.norm());
        let radius = (ap * ap + am * am).sqrt();
        let theta = 2.0 * am.atan2(ap);
        let phi = if am <= 1e-15 * radius || ap <= 1e-15 * radius {
            0.0
        } else {
            wrap_angle(cm.arg() - cp.arg())
        };
        Ok(BlochPoint { radius, theta, phi })
    }

    /// Inverse of [`CptFrame::to_bloch`] up to the global phase dropped
    /// there: `R cos(Theta/2) |eps_+> + R sin(Theta/2) e^{i Phi} |eps_->`.
    pub fn from_bloch(&self, point: &BlochPoint) -> QubitState {
        let cp = C64::new(point.radius * (point.theta / 2.0).cos(), 0.0);
        let cm = C64::from_polar(point.radius * (point.theta / 2.0).sin(), point.phi);
        QubitState::new(
            cp * self.eps_plus.amp0 + cm * self.eps_minus.amp0,
            cp * self.eps_plus.amp1 + cm * self.eps_minus.amp1,
        )
    }
}

fn wrap_angle(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

/// A point in `(R, Theta, Phi)` coordinates on the non-Hermitian Bloch
/// sphere; `Theta` in `[0, pi]`, `Phi` in `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub radius: f64,
    pub theta: f64,
    pub phi: f64,
}

impl BlochPoint {
    /// Cartesian `(x, y, z)` with `z = R cos(Theta)`,
    /// `x = R sin(Theta) cos(Phi)`, `y = R sin(Theta) sin(Phi)`.
    pub fn cartesian(&self) -> [f64; 3] {
        let st = self.theta.sin();
        [
            self.radius * st * self.phi.cos(),
            self.radius * st * self.phi.sin(),
            self.radius * self.theta.cos(),
        ]
    }

    /// The same direction projected onto the unit sphere.
    pub fn unit(&self) -> BlochPoint {
        BlochPoint {
            radius: 1.0,
            theta: self.theta,
            phi: self.phi,
        }
    }
}

/// One trajectory sample: the raw point (with decaying `R`) and its
/// projection onto the unit sphere.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t_us: f64,
    pub raw: BlochPoint,
    pub normalized: BlochPoint,
}

/// Sample the trajectory of `psi0` under `H_M` at `n_steps` uniform times on
/// `[0, tau_max]`. Requires the physical frame (`r < 1`).
pub fn trajectory_hm(
    params: &SystemParams,
    psi0: &QubitState,
    tau_max: f64,
    n_steps: usize,
) -> Result<Vec<TrajectoryPoint>> {
    let frame = CptFrame::new(params)?;
    trajectory_with_frame(&frame, psi0, tau_max, n_steps)
}

/// Trajectory sampling against an explicit frame; combined with
/// [`CptFrame::new_with_continuation`] this reproduces over-damped plots.
pub fn trajectory_with_frame(
    frame: &CptFrame,
    psi0: &QubitState,
    tau_max: f64,
    n_steps: usize,
) -> Result<Vec<TrajectoryPoint>> {
    if n_steps < 2 || !tau_max.is_finite() || tau_max < 0.0 {
        return Err(Error::InvalidParams(format!(
            "tau_max = {tau_max}, n_steps = {n_steps}: need tau_max >= 0 and n_steps >= 2"
        )));
    }
    let h = h_m(frame.params());
    let mut out = Vec::with_capacity(n_steps);
    for i in 0..n_steps {
        let t = tau_max * i as f64 / (n_steps - 1) as f64;
        let u = expm_closed(&h.scale(C64::new(0.0, -t)));
        let psi = u.apply(psi0);
        let raw = frame.to_bloch(&psi)?;
        out.push(TrajectoryPoint {
            t_us: t,
            raw,
            normalized: raw.unit(),
        });
    }
    Ok(out)
}

/// Write a trajectory as CSV with the fixed schema
/// `t_us,x,y,z,x_norm,y_norm,z_norm,R,Theta,Phi` at full double precision.
pub fn write_trajectory_csv<W: Write>(mut w: W, points: &[TrajectoryPoint]) -> io::Result<()> {
    writeln!(w, "t_us,x,y,z,x_norm,y_norm,z_norm,R,Theta,Phi")?;
    for p in points {
        let [x, y, z] = p.raw.cartesian();
        let [xn, yn, zn] = p.normalized.cartesian();
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.t_us, x, y, z, xn, yn, zn, p.raw.radius, p.raw.theta, p.raw.phi
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SymmetryOps;

    fn params_a() -> SystemParams {
        SystemParams::new(0.06, 0.03).unwrap()
    }

    #[test]
    fn c_operator_identities() {
        let frame = CptFrame::new(&params_a()).unwrap();
        let c = frame.c_op();
        assert!(((*c * *c) - Mat2::identity()).norm_max() <= 1e-12);
        let h = h_m(frame.params());
        assert!(((h * *c) - (*c * h)).norm_max() <= 1e-12);
        let k = SymmetryOps::new().pt_map(c);
        assert!((k - *c).norm_max() <= 1e-12);
    }

    #[test]
    fn eigenstates_are_cpt_orthonormal() {
        let frame = CptFrame::new(&params_a()).unwrap();
        let pp = frame.cpt_inner(frame.eps_plus(), frame.eps_plus());
        let mm = frame.cpt_inner(frame.eps_minus(), frame.eps_minus());
        let pm = frame.cpt_inner(frame.eps_plus(), frame.eps_minus());
        assert!((pp - C64::new(1.0, 0.0)).norm() <= 1e-10);
        assert!((mm - C64::new(1.0, 0.0)).norm() <= 1e-10);
        assert!(pm.norm() <= 1e-10);
    }

    #[test]
    fn hermitian_limit_reduces_to_dirac() {
        // Gamma = 0: C = sigma_x, the metric is the identity, and
        // |eps_+> = (|0> + |1>)/sqrt(2) has unit norm.
        let p = SystemParams::new(0.06, 0.0).unwrap();
        let frame = CptFrame::new(&p).unwrap();
        let s = 0.5f64.sqrt();
        let plus = QubitState::new(C64::new(s, 0.0), C64::new(s, 0.0));
        let n = frame.cpt_inner(&plus, &plus);
        assert!((n - C64::new(1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn poles_map_to_axis() {
        let frame = CptFrame::new(&params_a()).unwrap();
        let top = frame.to_bloch(frame.eps_plus()).unwrap();
        assert!((top.radius - 1.0).abs() <= 1e-10);
        assert!(top.theta.abs() <= 1e-7);
        assert_eq!(top.phi, 0.0);
        let [x, y, z] = top.cartesian();
        assert!(x.abs() <= 1e-7 && y.abs() <= 1e-7 && (z - 1.0).abs() <= 1e-10);

        let bottom = frame.to_bloch(frame.eps_minus()).unwrap();
        assert!((bottom.theta - PI).abs() <= 1e-7);
        let [_, _, zb] = bottom.cartesian();
        assert!((zb + 1.0).abs() <= 1e-10);
    }

    #[test]
    fn bloch_round_trip_up_to_phase() {
        let frame = CptFrame::new(&params_a()).unwrap();
        let s = 0.5f64.sqrt();
        let psi = QubitState::new(C64::new(s, 0.0), C64::new(-s, 0.0));
        let pt = frame.to_bloch(&psi).unwrap();
        let back = frame.from_bloch(&pt);
        // equal up to a global phase: |<psi|back>| = |psi| * |back|
        let ip = psi.inner(&back).norm();
        assert!((ip - psi.norm() * back.norm()).abs() <= 1e-10);
        assert!((back.norm() - psi.norm()).abs() <= 1e-10);
    }

    #[test]
    fn cartesian_radius_identity() {
        let pt = BlochPoint {
            radius: 0.8,
            theta: 1.1,
            phi: -2.3,
        };
        let [x, y, z] = pt.cartesian();
        assert!((x * x + y * y + z * z - 0.64).abs() <= 1e-12);
    }

    #[test]
    fn invalid_regime_is_refused() {
        let p = SystemParams::new(0.06, 0.12).unwrap();
        assert!(matches!(CptFrame::new(&p), Err(Error::InvalidRegime(_))));
        // but the continuation constructor accepts it, flagged non-physical,
        // and C^2 = I still holds there
        let frame = CptFrame::new_with_continuation(&p).unwrap();
        assert!(!frame.regime_valid());
        let c = frame.c_op();
        assert!(((*c * *c) - Mat2::identity()).norm_max() <= 1e-12);
        // J = 0 has no frame at all
        let p0 = SystemParams::new(0.0, 0.1).unwrap();
        assert!(CptFrame::new_with_continuation(&p0).is_err());
        // and the exceptional point stays rejected even with the flag
        let pep = SystemParams::new(0.06, 0.06).unwrap();
        assert!(CptFrame::new_with_continuation(&pep).is_err());
    }

    #[test]
    fn zero_state_has_no_coordinates() {
        let frame = CptFrame::new(&params_a()).unwrap();
        let zero = QubitState::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        assert!(matches!(frame.to_bloch(&zero), Err(Error::ZeroState)));
    }

    #[test]
    fn stationary_point_without_dissipation() {
        // Gamma = 0 and an eigenstate start: the normalized point is fixed.
        let p = SystemParams::new(0.06, 0.0).unwrap();
        let frame = CptFrame::new(&p).unwrap();
        let psi0 = *frame.eps_plus();
        let traj = trajectory_with_frame(&frame, &psi0, 50.0, 11).unwrap();
        for pt in &traj {
            assert!(pt.normalized.theta.abs() <= 1e-6);
            assert!((pt.raw.radius - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn csv_schema_is_stable() {
        let p = params_a();
        let s = 0.5f64.sqrt();
        let psi0 = QubitState::new(C64::new(s, 0.0), C64::new(-s, 0.0));
        let traj = trajectory_hm(&p, &psi0, 10.0, 3).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &traj).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t_us,x,y,z,x_norm,y_norm,z_norm,R,Theta,Phi"
        );
        assert_eq!(lines.count(), 3);
    }
}
