//! Velocity laws and pointwise diagnostics of the guidance field.
//!
//! All three laws move the particle along a future-directed four-vector:
//!
//! * de Broglie: `u = −S^μ`, i.e. `dt/dτ = −S⁰`, `dx/dτ = −S¹ = ∂ₓS`;
//! * modified: `dt/dτ = |S⁰|`, same spatial component;
//! * energy flow: the time-like eigenvector of the stress tensor.
//!
//! `−S^μ` is parallel to the conserved current, so for the de Broglie law the
//! three-velocity is `v = S¹/S⁰ = ∂ₓS / (−∂ₜS)`, which reduces to `k/ω` for a
//! travelling wave `e^{i(kx − ωt)}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kgfield::{eval_field, polar, PolarSample, WaveState};
use crate::num::{lit, Real};
use crate::stressenergy::{stress_tensor, v_energy};

/// `|S⁰|` at or below this fraction of `|S¹|` is reported as a pole.
pub const POLE_FRACTION: f64 = 1e-12;

/// Default number of scan points for root and interval searches.
pub const DEFAULT_SCAN_POINTS: usize = 4096;

/// Bisection stops once a bracket is narrower than this.
pub const ROOT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VelocityLaw {
    #[serde(rename = "debroglie")]
    DeBroglie,
    #[serde(rename = "modified")]
    ModifiedAbs,
    #[serde(rename = "energy")]
    EnergyFlow,
}

impl VelocityLaw {
    pub const ALL: [VelocityLaw; 3] = [
        VelocityLaw::DeBroglie,
        VelocityLaw::ModifiedAbs,
        VelocityLaw::EnergyFlow,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            VelocityLaw::DeBroglie => "debroglie",
            VelocityLaw::ModifiedAbs => "modified",
            VelocityLaw::EnergyFlow => "energy",
        }
    }
}

impl fmt::Display for VelocityLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VelocityLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "debroglie" => Ok(VelocityLaw::DeBroglie),
            "modified" => Ok(VelocityLaw::ModifiedAbs),
            "energy" => Ok(VelocityLaw::EnergyFlow),
            other => Err(Error::InvalidConfig(format!(
                "unknown law '{other}', expected debroglie, modified or energy"
            ))),
        }
    }
}

/// Tangent of a flow line, `(dt/dτ, dx/dτ)`.
///
/// For the energy-flow law the parameter is coordinate time, so `dtau_t` is 1
/// and `dtau_x` is the slope `dx/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowVector<T> {
    pub dtau_t: T,
    pub dtau_x: T,
}

impl<T: Real> FlowVector<T> {
    /// `dx/dt`.
    pub fn slope(&self) -> T {
        self.dtau_x / self.dtau_t
    }
}

fn pole_check<T: Real>(p: &PolarSample<T>) -> Result<()> {
    p.regular()?;
    let s = p.s_upper();
    if s.t == T::zero() || s.t.abs() <= lit::<T>(POLE_FRACTION) * s.x.abs() {
        return Err(Error::Pole {
            x: p.x.to_f64().unwrap_or(f64::NAN),
            t: p.t.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// de Broglie three-velocity `v = (−S¹)/(−S⁰)`.
pub fn v_debroglie<T: Real>(p: &PolarSample<T>) -> Result<T> {
    pole_check(p)?;
    let s = p.s_upper();
    Ok(s.x / s.t)
}

/// Three-velocity with the magnitude of `S⁰`, `v = −S¹/|S⁰|`.
pub fn v_modified<T: Real>(p: &PolarSample<T>) -> Result<T> {
    pole_check(p)?;
    let s = p.s_upper();
    Ok(-s.x / s.t.abs())
}

/// Flow tangent for `law` built from an already decomposed sample.
pub fn flow_from_polar<T: Real>(
    p: &PolarSample<T>,
    law: VelocityLaw,
    rest_mass: T,
) -> Result<FlowVector<T>> {
    p.regular()?;
    let s = p.s_upper();
    match law {
        VelocityLaw::DeBroglie => Ok(FlowVector {
            dtau_t: -s.t,
            dtau_x: -s.x,
        }),
        VelocityLaw::ModifiedAbs => Ok(FlowVector {
            dtau_t: s.t.abs(),
            dtau_x: -s.x,
        }),
        VelocityLaw::EnergyFlow => {
            let v = v_energy(&stress_tensor(p, rest_mass)?)?;
            Ok(FlowVector {
                dtau_t: T::one(),
                dtau_x: v,
            })
        }
    }
}

/// Flow tangent for `law` at `(x, t)`.
pub fn flow_field<T: Real>(
    state: &WaveState<T>,
    law: VelocityLaw,
    x: T,
    t: T,
    eps_node: T,
) -> Result<FlowVector<T>> {
    let p = polar(&eval_field(state, x, t)?, eps_node);
    flow_from_polar(&p, law, state.rest_mass())
}

fn bisect<T: Real, F: Fn(T) -> T>(f: &F, mut lo: T, mut hi: T, tol: T) -> T {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = (lo + hi) / lit(2.0);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return mid;
        }
        if (f_mid < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / lit(2.0)
}

fn grid<T: Real>(interval: (T, T), grid_n: usize) -> Vec<T> {
    let n = grid_n.max(2);
    let (a, b) = interval;
    let dx = (b - a) / T::count(n - 1);
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + dx * T::count(i) })
        .collect()
}

/// Sign changes of `f` on a uniform grid, refined by bisection.
///
/// Exact zeros on the grid are skipped; a root is reported only where the
/// sign actually flips.
pub fn sign_changes<T: Real, F: Fn(T) -> T>(f: F, interval: (T, T), grid_n: usize) -> Vec<T> {
    let tol = lit::<T>(ROOT_TOLERANCE);
    let mut roots = Vec::new();
    let mut prev: Option<(T, bool)> = None;
    for x in grid(interval, grid_n) {
        let v = f(x);
        if v == T::zero() || !v.is_finite() {
            continue;
        }
        let neg = v < T::zero();
        if let Some((px, pneg)) = prev {
            if pneg != neg {
                roots.push(bisect(&f, px, x, tol));
            }
        }
        prev = Some((x, neg));
    }
    roots
}

/// Maximal subintervals of `interval` on which `f < 0`, with
/// bisection-refined endpoints.
pub fn negative_intervals<T: Real, F: Fn(T) -> T>(
    f: F,
    interval: (T, T),
    grid_n: usize,
) -> Vec<(T, T)> {
    let tol = lit::<T>(ROOT_TOLERANCE);
    let mut out = Vec::new();
    let mut open: Option<T> = None;
    let mut prev: Option<(T, bool)> = None;
    for x in grid(interval, grid_n) {
        let v = f(x);
        if !v.is_finite() {
            continue;
        }
        let neg = v < T::zero();
        match prev {
            None => {
                if neg {
                    open = Some(interval.0);
                }
            }
            Some((px, pneg)) if pneg != neg => {
                let edge = if v == T::zero() {
                    x
                } else {
                    bisect(&f, px, x, tol)
                };
                if neg {
                    open = Some(edge);
                } else if let Some(start) = open.take() {
                    out.push((start, edge));
                }
            }
            _ => {}
        }
        prev = Some((x, neg));
    }
    if let Some(start) = open {
        out.push((start, interval.1));
    }
    out
}

/// Positions in `interval` where `S⁰` changes sign at time `t`.
///
/// The scan runs on `Im(Φ*∂ₜΦ) = R²S⁰`, which has the sign of `S⁰` but stays
/// finite at nodes.
pub fn roots_of_s0<T: Real>(state: &WaveState<T>, t: T, interval: (T, T), grid_n: usize) -> Vec<T> {
    let f = |x: T| {
        state
            .weighted_phase_gradient(x, t)
            .map(|(w0, _)| w0)
            .unwrap_or(T::nan())
    };
    sign_changes(f, interval, grid_n)
}

/// Subintervals where `J⁰ < 0` at time `t`.
pub fn negativity_scan<T: Real>(
    state: &WaveState<T>,
    t: T,
    interval: (T, T),
    grid_n: usize,
) -> Vec<(T, T)> {
    // J⁰ = −R²S_0 / m0; the positive mass factor does not change the sign.
    let f = |x: T| {
        state
            .weighted_phase_gradient(x, t)
            .map(|(w0, _)| -w0)
            .unwrap_or(T::nan())
    };
    negative_intervals(f, interval, grid_n)
}

/// Subintervals where the de Broglie speed exceeds 1, i.e. `(S⁰)² < (S¹)²`.
pub fn superluminal_intervals<T: Real>(
    state: &WaveState<T>,
    t: T,
    interval: (T, T),
    grid_n: usize,
) -> Vec<(T, T)> {
    let f = |x: T| {
        state
            .weighted_phase_gradient(x, t)
            .map(|(w0, w1)| w0 * w0 - w1 * w1)
            .unwrap_or(T::nan())
    };
    negative_intervals(f, interval, grid_n)
}

/// Subintervals where `m0² + □R/R < 0`.
///
/// Scans `R⁴(m0² + □R/R)`, which has the same sign away from nodes and no
/// singularity at them.
pub fn effective_mass_negative_intervals<T: Real>(
    state: &WaveState<T>,
    t: T,
    interval: (T, T),
    grid_n: usize,
) -> Vec<(T, T)> {
    let m2 = state.rest_mass() * state.rest_mass();
    let f = |x: T| match eval_field(state, x, t) {
        Ok(s) => {
            let c = s.value.conj();
            let r2 = s.density();
            let w0 = (c * s.dt).im;
            let w1 = (c * s.dx).im;
            m2 * r2 * r2 + r2 * (c * s.dalembertian()).re + w0 * w0 - w1 * w1
        }
        Err(_) => T::nan(),
    };
    negative_intervals(f, interval, grid_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kgfield::{BoxConfig, ModeSpec};
    use std::f64::consts::PI;

    fn two_mode() -> WaveState<f64> {
        WaveState::equal_superposition(BoxConfig::unit_pi(), &[1, 2]).unwrap()
    }

    fn single() -> WaveState<f64> {
        WaveState::new(BoxConfig::unit_pi(), vec![ModeSpec::real(1, 1.0)]).unwrap()
    }

    #[test]
    fn law_names_round_trip() {
        for law in VelocityLaw::ALL {
            assert_eq!(law.as_str().parse::<VelocityLaw>().unwrap(), law);
            assert_eq!(
                serde_json::to_string(&law).unwrap(),
                format!("\"{}\"", law.as_str())
            );
        }
        assert!("DeBroglie".parse::<VelocityLaw>().is_err());
    }

    #[test]
    fn single_mode_is_at_rest() {
        let s = single();
        let p = s.polar_at(1.2, 0.5, 1e-10).unwrap();
        assert_eq!(v_debroglie(&p).unwrap(), 0.0);
        assert_eq!(v_modified(&p).unwrap(), 0.0);
        let f = flow_field(&s, VelocityLaw::DeBroglie, 1.2, 0.5, 1e-10).unwrap();
        assert!((f.dtau_t - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(f.dtau_x, 0.0);
        assert!(roots_of_s0(&s, 0.5, (0.0, PI), 1000).is_empty());
        assert!(negativity_scan(&s, 0.5, (0.0, PI), 1000).is_empty());
    }

    #[test]
    fn reference_roots() {
        let roots = roots_of_s0(&two_mode(), 0.1, (0.0, PI), DEFAULT_SCAN_POINTS);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] - 1.898).abs() < 2e-3);
        assert!((roots[1] - 2.086).abs() < 2e-3);
    }

    #[test]
    fn backward_window_at_two() {
        let s = two_mode();
        let f = flow_field(&s, VelocityLaw::DeBroglie, 2.0, 0.1, 1e-10).unwrap();
        assert!(f.dtau_t < 0.0);
        let m = flow_field(&s, VelocityLaw::ModifiedAbs, 2.0, 0.1, 1e-10).unwrap();
        assert!(m.dtau_t > 0.0);
        let p = s.polar_at(2.0, 0.1, 1e-10).unwrap();
        assert_eq!(v_modified(&p).unwrap(), -v_debroglie(&p).unwrap());
    }

    #[test]
    fn pole_is_reported() {
        let s = two_mode();
        let roots = roots_of_s0(&s, 0.1, (0.0, PI), DEFAULT_SCAN_POINTS);
        let mut p = s.polar_at(roots[0], 0.1, 1e-10).unwrap();
        p.s_cov[0] = 0.0;
        assert!(matches!(v_debroglie(&p), Err(Error::Pole { .. })));
        assert!(matches!(v_modified(&p), Err(Error::Pole { .. })));
    }

    #[test]
    fn negativity_matches_backward_window() {
        let s = two_mode();
        let neg = negativity_scan(&s, 0.1, (0.0, PI), DEFAULT_SCAN_POINTS);
        let roots = roots_of_s0(&s, 0.1, (0.0, PI), DEFAULT_SCAN_POINTS);
        assert_eq!(neg.len(), 1);
        assert!((neg[0].0 - roots[0]).abs() < 1e-9);
        assert!((neg[0].1 - roots[1]).abs() < 1e-9);
    }

    #[test]
    fn interval_helper_handles_edges() {
        let iv = negative_intervals(|x: f64| x - 0.5, (0.0, 1.0), 11);
        assert_eq!(iv.len(), 1);
        assert_eq!(iv[0].0, 0.0);
        assert!((iv[0].1 - 0.5).abs() < 1e-10);
        let iv = negative_intervals(|x: f64| (x - 0.25) * (x - 0.75), (0.0, 1.0), 101);
        assert_eq!(iv.len(), 1);
        assert!((iv[0].0 - 0.25).abs() < 1e-10 && (iv[0].1 - 0.75).abs() < 1e-10);
        assert!(negative_intervals(|x: f64| x * x + 1.0, (0.0, 1.0), 11).is_empty());
    }
}
