//! Stress-energy-momentum tensor of the Klein-Gordon field and its
//! time-like eigenvector, which defines the energy-flow velocity.
//!
//! With `φ = e^{P + iS}` the covariant tensor is
//!
//! ```text
//! T_μν = 2|φ|² (P_μP_ν + S_μS_ν) − g_μν |φ|² (P·P + S·S − m0²)
//! ```
//!
//! and the flow direction solves `T^μ_ν W^ν = λ W^μ`. In 1+1 dimensions the
//! mixed tensor is `[[T_00, T_01], [−T_01, −T_11]]`, so the eigenvalues are
//! `(T_00 − T_11)/2 ± √((T_00 + T_11)²/4 − T_01²)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kgfield::PolarSample;
use crate::num::{lit, Real};
use crate::spacetime::TwoVector;

/// `|T_01|` below this fraction of `‖T‖` counts as axis-aligned.
pub const AXIS_TOLERANCE: f64 = 1e-12;

/// Covariant components of the symmetric 1+1 stress tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StressTensor<T> {
    pub t00: T,
    pub t01: T,
    pub t11: T,
    /// `|φ|²` at the sample point.
    pub density: T,
}

impl<T: Real> StressTensor<T> {
    /// Largest absolute covariant component.
    pub fn max_abs(&self) -> T {
        self.t00.abs().max(self.t01.abs()).max(self.t11.abs())
    }

    /// Mixed components `T^μ_ν` as a row-major matrix.
    pub fn mixed(&self) -> [[T; 2]; 2] {
        [[self.t00, self.t01], [-self.t01, -self.t11]]
    }

    /// `T^μ_ν W^ν`.
    pub fn apply(&self, w: &TwoVector<T>) -> TwoVector<T> {
        let m = self.mixed();
        TwoVector::new(m[0][0] * w.t + m[0][1] * w.x, m[1][0] * w.t + m[1][1] * w.x)
    }

    /// Trace of the mixed tensor, `T_00 − T_11`.
    pub fn trace(&self) -> T {
        self.t00 - self.t11
    }

    /// `(T_00 + T_11)²/4 − T_01²`.
    pub fn discriminant(&self) -> T {
        let h = (self.t00 + self.t11) / lit(2.0);
        h * h - self.t01 * self.t01
    }
}

/// Tensor assembled from the polar gradients.
pub fn stress_tensor<T: Real>(polar: &PolarSample<T>, rest_mass: T) -> Result<StressTensor<T>> {
    polar.regular()?;
    let rho = polar.density();
    let [p0, p1] = polar.p_cov;
    let [s0, s1] = polar.s_cov;
    let two = lit::<T>(2.0);
    let trace_part = rho * (polar.p_sq() + polar.s_sq() - rest_mass * rest_mass);
    Ok(StressTensor {
        t00: two * rho * (p0 * p0 + s0 * s0) - trace_part,
        t01: two * rho * (p0 * p1 + s0 * s1),
        t11: two * rho * (p1 * p1 + s1 * s1) + trace_part,
        density: rho,
    })
}

/// Why a real eigenpair cannot give a unique time-like velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowDegeneracy {
    /// `T_01 ≈ 0`: the eigenvectors lie along the coordinate axes.
    AxisAligned,
    /// Coincident eigenvalues with a null eigenvector.
    Null,
}

/// Time-like and space-like eigenpairs of `T^μ_ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowEigenpair<T> {
    pub lambda_time: T,
    pub lambda_space: T,
    /// Normalized to `W⁰ = 1`.
    pub w_time: TwoVector<T>,
    /// Normalized to `W¹ = 1`.
    pub w_space: TwoVector<T>,
    pub degeneracy: Option<FlowDegeneracy>,
}

impl<T> FlowEigenpair<T> {
    pub fn is_degenerate(&self) -> bool {
        self.degeneracy.is_some()
    }
}

/// Result of the eigen-decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EigenFlow<T> {
    Real(FlowEigenpair<T>),
    /// Negative discriminant: eigenvalues `re ± i·im`, no real flow.
    Complex {
        re: T,
        im: T,
    },
}

impl<T: Real> EigenFlow<T> {
    pub fn is_degenerate(&self) -> bool {
        match self {
            EigenFlow::Real(p) => p.is_degenerate(),
            EigenFlow::Complex { .. } => true,
        }
    }

    pub fn real(&self) -> Result<&FlowEigenpair<T>> {
        match self {
            EigenFlow::Real(p) => Ok(p),
            EigenFlow::Complex { re, im } => Err(Error::ComplexEigenvalues {
                re: re.to_f64().unwrap_or(f64::NAN),
                im: im.to_f64().unwrap_or(f64::NAN),
            }),
        }
    }
}

fn eigenvector<T: Real>(t: &StressTensor<T>, lambda: T) -> TwoVector<T> {
    let a = TwoVector::new(t.t01, lambda - t.t00);
    let b = TwoVector::new(t.t11 + lambda, -t.t01);
    if a.euclid_sq() >= b.euclid_sq() {
        a
    } else {
        b
    }
}

/// Solves `T^μ_ν W^ν = λ W^μ`, picking the time-like branch by the sign of
/// the Minkowski norm of each eigenvector.
pub fn eigen_flow<T: Real>(t: &StressTensor<T>) -> EigenFlow<T> {
    let scale = t.max_abs();
    let half_trace = t.trace() / lit(2.0);
    let axis = |d| {
        EigenFlow::Real(FlowEigenpair {
            lambda_time: t.t00,
            lambda_space: -t.t11,
            w_time: TwoVector::new(T::one(), T::zero()),
            w_space: TwoVector::new(T::zero(), T::one()),
            degeneracy: Some(d),
        })
    };
    if scale == T::zero() || t.t01.abs() < lit::<T>(AXIS_TOLERANCE) * scale {
        return axis(FlowDegeneracy::AxisAligned);
    }
    let disc = t.discriminant();
    let round_off = lit::<T>(AXIS_TOLERANCE) * scale * scale;
    if disc < -round_off {
        return EigenFlow::Complex {
            re: half_trace,
            im: (-disc).sqrt(),
        };
    }
    let root = disc.max(T::zero()).sqrt();
    let (la, lb) = (half_trace + root, half_trace - root);
    let (wa, wb) = (eigenvector(t, la), eigenvector(t, lb));
    let (na, nb) = (wa.norm_sq(), wb.norm_sq());
    let null_tol = lit::<T>(AXIS_TOLERANCE);
    let timelike = |n: T, w: &TwoVector<T>| n > null_tol * w.euclid_sq();
    let (lt, wt, ls, ws) = if timelike(na, &wa) && !timelike(nb, &wb) {
        (la, wa, lb, wb)
    } else if timelike(nb, &wb) && !timelike(na, &wa) {
        (lb, wb, la, wa)
    } else {
        // Coincident roots: the only eigendirection is null.
        let w = TwoVector::new(T::one(), wa.x / wa.t);
        return EigenFlow::Real(FlowEigenpair {
            lambda_time: la,
            lambda_space: lb,
            w_time: w,
            w_space: TwoVector::new(w.x, T::one()),
            degeneracy: Some(FlowDegeneracy::Null),
        });
    };
    EigenFlow::Real(FlowEigenpair {
        lambda_time: lt,
        lambda_space: ls,
        w_time: wt.scale(T::one() / wt.t),
        w_space: ws.scale(T::one() / ws.x),
        degeneracy: None,
    })
}

/// Energy-flow three-velocity `W¹/W⁰ = −(T_00 − λ)/T_01`.
///
/// Returns 0 for an axis-aligned tensor (energy at rest).
pub fn v_energy<T: Real>(t: &StressTensor<T>) -> Result<T> {
    let pair = *eigen_flow(t).real()?;
    match pair.degeneracy {
        Some(FlowDegeneracy::AxisAligned) => Ok(T::zero()),
        Some(FlowDegeneracy::Null) => Err(Error::NoTimelikeFlow("eigenvector is null".into())),
        None => Ok(-(t.t00 - pair.lambda_time) / t.t01),
    }
}

/// Energy-flow velocity from the rapidity-angle form
/// `W^μ = S^μ ± e^{±θ} P^μ` with `sinh θ = (P·P − S·S)/(2 P·S)`.
///
/// Both branches are built and the unique time-like one is returned.
pub fn v_theta<T: Real>(polar: &PolarSample<T>) -> Result<T> {
    polar.regular()?;
    let ps = polar.p_dot_s();
    let mag = polar.p_cov[0].abs().max(polar.p_cov[1].abs())
        * polar.s_cov[0].abs().max(polar.s_cov[1].abs());
    if ps == T::zero() || ps.abs() <= lit::<T>(1e-14) * mag {
        return Err(Error::UndefinedTheta);
    }
    let sinh_theta = (polar.p_sq() - polar.s_sq()) / (lit::<T>(2.0) * ps);
    let theta = sinh_theta.asinh();
    let (s, p) = (polar.s_upper(), polar.p_upper());
    let candidates = [theta.exp(), -(-theta).exp()].map(|c| s.add(&p.scale(c)));
    let timelike: Vec<&TwoVector<T>> = candidates
        .iter()
        .filter(|w| w.norm_sq() > T::zero())
        .collect();
    match timelike.as_slice() {
        [w] => Ok(w.x / w.t),
        [] => Err(Error::NoTimelikeFlow(
            "neither branch of the rapidity form is time-like".into(),
        )),
        _ => Err(Error::NoTimelikeFlow(
            "both branches of the rapidity form are time-like".into(),
        )),
    }
}
