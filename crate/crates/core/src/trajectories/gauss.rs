use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kgfield::WaveState;
use crate::num::{lit, Real};

/// Axis-aligned rectangle `[x_min, x_max] × [t_min, t_max]` in space-time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeRect<T> {
    pub x_min: T,
    pub x_max: T,
    pub t_min: T,
    pub t_max: T,
}

impl<T: Real> SpacetimeRect<T> {
    pub fn new(x_min: T, x_max: T, t_min: T, t_max: T) -> Self {
        Self {
            x_min,
            x_max,
            t_min,
            t_max,
        }
    }
}

/// Outward flux of `J^μ = −R²S^μ/m0` through each edge of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussFlux<T> {
    /// `−∫ J⁰ dx` at `t_min`.
    pub bottom: T,
    /// `+∫ J⁰ dx` at `t_max`.
    pub top: T,
    /// `−∫ J¹ dt` at `x_min`.
    pub left: T,
    /// `+∫ J¹ dt` at `x_max`.
    pub right: T,
    pub net: T,
}

fn simpson<T: Real>(f: impl Fn(T) -> Result<T>, a: T, b: T, n: usize) -> Result<T> {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / T::count(n);
    let mut acc = f(a)? + f(b)?;
    for i in 1..n {
        let w: T = if i % 2 == 1 { lit(4.0) } else { lit(2.0) };
        acc = acc + w * f(a + h * T::count(i))?;
    }
    Ok(acc * h / lit(3.0))
}

/// Net current flux out of `rect`, by composite Simpson quadrature with
/// `edge_n` intervals per edge (rounded up to even).
///
/// The current is conserved, so the net flux vanishes up to quadrature error.
/// Edges on a wall contribute exactly zero because `Φ = 0` there.
pub fn gauss_flux<T: Real>(
    state: &WaveState<T>,
    rect: &SpacetimeRect<T>,
    edge_n: usize,
) -> Result<GaussFlux<T>> {
    let len = state.length();
    if !(rect.x_min >= T::zero() && rect.x_max <= len && rect.x_min < rect.x_max) {
        return Err(Error::InvalidConfig(format!(
            "rectangle x-range [{}, {}] must lie inside [0, {}]",
            rect.x_min, rect.x_max, len
        )));
    }
    if !(rect.t_min < rect.t_max) {
        return Err(Error::InvalidConfig("rectangle needs t_min < t_max".into()));
    }
    let m0 = state.rest_mass();
    if !(m0 > T::zero()) {
        return Err(Error::MasslessCurrent);
    }
    // (R²S_0, R²S_1) → J = (−R²S_0, R²S_1)/m0.
    let j0 = |x: T, t: T| state.weighted_phase_gradient(x, t).map(|(w0, _)| -w0 / m0);
    let j1 = |x: T, t: T| state.weighted_phase_gradient(x, t).map(|(_, w1)| w1 / m0);
    let bottom = -simpson(|x| j0(x, rect.t_min), rect.x_min, rect.x_max, edge_n)?;
    let top = simpson(|x| j0(x, rect.t_max), rect.x_min, rect.x_max, edge_n)?;
    let left = -simpson(|t| j1(rect.x_min, t), rect.t_min, rect.t_max, edge_n)?;
    let right = simpson(|t| j1(rect.x_max, t), rect.t_min, rect.t_max, edge_n)?;
    Ok(GaussFlux {
        bottom,
        top,
        left,
        right,
        net: bottom + top + left + right,
    })
}
