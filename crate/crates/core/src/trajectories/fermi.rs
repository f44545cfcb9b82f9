//! Fermi-Walker transport of an orthonormal dyad along a sampled path.
//!
//! With `u` the unit tangent (`u·u = ε = ±1`) and `u̇ = du/dτ` the transport
//! law is
//!
//! ```text
//! dV/dτ = ε [ u̇ (u·V) − u (u̇·V) ]
//! ```
//!
//! which is valid for any parametrization and for time-like as well as
//! space-like tangents.
//!
//! At a null tangent `u` is undefined. Runs of samples whose tangent is
//! within `null_fraction` of null are bracketed: across the bracket the frame
//! is boosted by the difference of the tangent's axis rapidity at the two
//! ends, and interior samples get the linearly interpolated rapidity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{lit, Real};
use crate::spacetime::{axis_rapidity, TwoVector};

use super::TrajectoryRecord;

/// Default bracketing threshold on `|T·T| / |T|²`.
pub const DEFAULT_NULL_FRACTION: f64 = 1e-6;

/// A time-like and a space-like unit vector, mutually orthogonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadFrame<T> {
    pub e_time: TwoVector<T>,
    pub e_space: TwoVector<T>,
}

impl<T: Real> DyadFrame<T> {
    /// The coordinate dyad `((1, 0), (0, 1))`.
    pub fn standard() -> Self {
        Self {
            e_time: TwoVector::new(T::one(), T::zero()),
            e_space: TwoVector::new(T::zero(), T::one()),
        }
    }

    /// Largest deviation from `e_t·e_t = 1`, `e_s·e_s = −1`, `e_t·e_s = 0`.
    pub fn drift(&self) -> T {
        let a = (self.e_time.norm_sq() - T::one()).abs();
        let b = (self.e_space.norm_sq() + T::one()).abs();
        let c = self.e_time.dot(&self.e_space).abs();
        a.max(b).max(c)
    }

    pub fn boosted(&self, r: T) -> Self {
        Self {
            e_time: self.e_time.boost(r),
            e_space: self.e_space.boost(r),
        }
    }
}

/// Transports `dyad0` along `record` with the default null threshold.
pub fn fermi_transport<T: Real>(
    record: &TrajectoryRecord<T>,
    dyad0: DyadFrame<T>,
) -> Result<Vec<DyadFrame<T>>> {
    fermi_transport_with(record, dyad0, lit(DEFAULT_NULL_FRACTION))
}

/// Transports `dyad0` along `record`, returning the frame at every sample.
///
/// In one space dimension the transport generator is a boost whose rate is
/// the derivative of the tangent's axis rapidity, so between two samples on
/// the same side of the light cone the exact solution is a boost by the
/// rapidity difference. Only the accuracy of the sampled tangents enters.
pub fn fermi_transport_with<T: Real>(
    record: &TrajectoryRecord<T>,
    dyad0: DyadFrame<T>,
    null_fraction: T,
) -> Result<Vec<DyadFrame<T>>> {
    let s = &record.samples;
    let n = s.len();
    if n < 2 {
        return Ok(vec![dyad0; n]);
    }
    let tan: Vec<TwoVector<T>> = s
        .iter()
        .map(|p| TwoVector::new(p.dtau_t, p.dtau_x))
        .collect();
    let null_at = |k: usize| Error::NullTangent {
        tau: s[k].tau.to_f64().unwrap_or(f64::NAN),
    };
    if let Some(k) = tan
        .iter()
        .position(|v| v.euclid_sq() == T::zero() || !v.is_finite())
    {
        return Err(null_at(k));
    }
    let q: Vec<T> = tan.iter().map(|v| v.norm_sq() / v.euclid_sq()).collect();
    let good = |k: usize| q[k].abs() >= null_fraction && q[k] != T::zero();
    if !good(0) {
        return Err(null_at(0));
    }
    let eta: Vec<T> = tan.iter().map(axis_rapidity).collect();

    let mut frames = Vec::with_capacity(n);
    frames.push(dyad0);
    let mut k = 0;
    while k + 1 < n {
        if good(k + 1) && (q[k] > T::zero()) == (q[k + 1] > T::zero()) {
            frames.push(frames[k].boosted(eta[k + 1] - eta[k]));
            k += 1;
            continue;
        }
        let end = (k + 1..n).find(|&m| good(m)).ok_or_else(|| null_at(k))?;
        let dr = eta[end] - eta[k];
        let span = s[end].tau - s[k].tau;
        let base = frames[k];
        for m in k + 1..=end {
            frames.push(base.boosted(dr * (s[m].tau - s[k].tau) / span));
        }
        k = end;
    }
    Ok(frames)
}
