//! Klein-Gordon superpositions confined to a one-dimensional scalar box.
//!
//! A state is a finite sum of box eigenmodes
//!
//! ```text
//! Φ(x, t) = Σ aₙ √(2/L) sin(nπx/L) e^{−iωₙt},   ωₙ = √((nπ/L)² + m0²)
//! ```
//!
//! with units ħ = c = 1. Every derivative is taken termwise on the mode sum,
//! so nothing here depends on finite differences. The polar form
//! `Φ = R e^{iS} = e^{P + iS}` is derived from the analytic derivatives via
//! `∂Φ/Φ = ∂P + i∂S`, which avoids differentiating `|Φ|` at nodes.
//!
//! Index convention: covariant gradients are stored (`S_0 = ∂ₜS`,
//! `S_1 = ∂ₓS`); contravariant components follow from the `(+, −)` metric,
//! `S⁰ = S_0` and `S¹ = −S_1`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{lit, Real};
use crate::spacetime::TwoVector;

/// Relative node tolerance used when callers do not supply one.
pub const DEFAULT_NODE_FRACTION: f64 = 1e-10;

/// Box of length `L` with rest mass `m0`, in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxConfig<T> {
    pub length: T,
    pub rest_mass: T,
}

impl<T: Real> BoxConfig<T> {
    pub fn new(length: T, rest_mass: T) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "box length must be > 0, got {length}"
            )));
        }
        if !(rest_mass >= T::zero()) || !rest_mass.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "rest mass must be >= 0, got {rest_mass}"
            )));
        }
        Ok(Self { length, rest_mass })
    }

    /// `L = π`, `m0 = 1`.
    pub fn unit_pi() -> Self {
        Self {
            length: T::PI(),
            rest_mass: T::one(),
        }
    }

    #[inline]
    pub fn wavenumber(&self, n: u32) -> T {
        T::from_u32(n).unwrap() * T::PI() / self.length
    }

    pub fn contains(&self, x: T) -> bool {
        x >= T::zero() && x <= self.length
    }
}

/// One eigenmode `n` with its complex coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec<T> {
    pub n: u32,
    pub amplitude: Complex<T>,
}

impl<T: Real> ModeSpec<T> {
    pub fn new(n: u32, amplitude: Complex<T>) -> Self {
        Self { n, amplitude }
    }

    pub fn real(n: u32, amplitude: T) -> Self {
        Self {
            n,
            amplitude: Complex::new(amplitude, T::zero()),
        }
    }
}

/// Positive-frequency eigenfrequency `ωₙ = √((nπ/L)² + m0²)`.
pub fn omega<T: Real>(config: &BoxConfig<T>, n: i64) -> Result<T> {
    if n < 1 {
        return Err(Error::InvalidModeNumber(n));
    }
    let k = config.wavenumber(n as u32);
    Ok((k * k + config.rest_mass * config.rest_mass).sqrt())
}

/// A superposition of box eigenmodes.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState<T> {
    config: BoxConfig<T>,
    modes: Vec<ModeSpec<T>>,
    frequencies: Vec<T>,
}

impl<T: Real> WaveState<T> {
    pub fn new(config: BoxConfig<T>, modes: Vec<ModeSpec<T>>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidConfig(
                "a state needs at least one mode".into(),
            ));
        }
        let mut seen: Vec<u32> = Vec::with_capacity(modes.len());
        for m in &modes {
            if m.n < 1 {
                return Err(Error::InvalidModeNumber(m.n as i64));
            }
            if seen.contains(&m.n) {
                return Err(Error::InvalidConfig(format!(
                    "mode n = {} listed twice",
                    m.n
                )));
            }
            if !m.amplitude.re.is_finite() || !m.amplitude.im.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "mode n = {} has a non-finite amplitude",
                    m.n
                )));
            }
            seen.push(m.n);
        }
        let frequencies = modes
            .iter()
            .map(|m| omega(&config, m.n as i64))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            config,
            modes,
            frequencies,
        })
    }

    /// Equal-weight superposition `(φ_{n₁} + φ_{n₂} + …)/√N`.
    pub fn equal_superposition(config: BoxConfig<T>, ns: &[u32]) -> Result<Self> {
        let a = T::one() / T::count(ns.len().max(1)).sqrt();
        Self::new(config, ns.iter().map(|&n| ModeSpec::real(n, a)).collect())
    }

    pub fn config(&self) -> &BoxConfig<T> {
        &self.config
    }

    pub fn modes(&self) -> &[ModeSpec<T>] {
        &self.modes
    }

    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    pub fn length(&self) -> T {
        self.config.length
    }

    pub fn rest_mass(&self) -> T {
        self.config.rest_mass
    }

    /// Copy of the state with every amplitude multiplied by `c`.
    pub fn scaled(&self, c: Complex<T>) -> Self {
        let mut out = self.clone();
        for m in &mut out.modes {
            m.amplitude = m.amplitude * c;
        }
        out
    }

    /// Copy of the state with the frequency of mode `n` shifted by `delta`.
    ///
    /// The result no longer solves the Klein-Gordon equation; it exists to
    /// give the identity checks a negative control.
    pub fn detuned(&self, n: u32, delta: T) -> Self {
        let mut out = self.clone();
        for (m, w) in out.modes.iter().zip(out.frequencies.iter_mut()) {
            if m.n == n {
                *w = *w + delta;
            }
        }
        out
    }

    /// Field value and analytic derivatives at `(x, t)`.
    pub fn eval(&self, x: T, t: T) -> Result<FieldSample<T>> {
        eval_field(self, x, t)
    }

    /// `(Im Φ*∂ₜΦ, Im Φ*∂ₓΦ) = R²(S_0, S_1)`, smooth through nodes.
    pub fn weighted_phase_gradient(&self, x: T, t: T) -> Result<(T, T)> {
        let f = eval_field(self, x, t)?;
        let c = f.value.conj();
        Ok(((c * f.dt).im, (c * f.dx).im))
    }

    /// Largest `|Φ|` over a uniform grid of `grid_n` points at time `t`.
    pub fn max_amplitude(&self, t: T, grid_n: usize) -> T {
        let n = grid_n.max(2);
        let dx = self.length() / T::count(n - 1);
        (0..n)
            .filter_map(|i| eval_field(self, dx * T::count(i), t).ok())
            .map(|f| f.value.norm())
            .fold(T::zero(), T::max)
    }

    /// Default node tolerance: `1e-10` times the largest grid amplitude.
    pub fn node_tolerance(&self, t: T, grid_n: usize) -> T {
        lit::<T>(DEFAULT_NODE_FRACTION) * self.max_amplitude(t, grid_n)
    }

    pub fn polar_at(&self, x: T, t: T, eps_node: T) -> Result<PolarSample<T>> {
        Ok(polar(&eval_field(self, x, t)?, eps_node))
    }
}

/// `Φ` and its first and second derivatives at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample<T> {
    pub x: T,
    pub t: T,
    pub value: Complex<T>,
    pub dt: Complex<T>,
    pub dx: Complex<T>,
    pub dtt: Complex<T>,
    pub dxx: Complex<T>,
    pub dtx: Complex<T>,
}

impl<T: Real> FieldSample<T> {
    /// `□Φ = ∂ₜₜΦ − ∂ₓₓΦ`.
    pub fn dalembertian(&self) -> Complex<T> {
        self.dtt - self.dxx
    }

    pub fn density(&self) -> T {
        self.value.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        [self.value, self.dt, self.dx, self.dtt, self.dxx, self.dtx]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Evaluates the mode sum and its derivatives termwise.
pub fn eval_field<T: Real>(state: &WaveState<T>, x: T, t: T) -> Result<FieldSample<T>> {
    let cfg = &state.config;
    if !cfg.contains(x) {
        return Err(Error::OutsideBox {
            x: x.to_f64().unwrap_or(f64::NAN),
            length: cfg.length.to_f64().unwrap_or(f64::NAN),
        });
    }
    let norm = (lit::<T>(2.0) / cfg.length).sqrt();
    let zero = Complex::new(T::zero(), T::zero());
    let mut s = FieldSample {
        x,
        t,
        value: zero,
        dt: zero,
        dx: zero,
        dtt: zero,
        dxx: zero,
        dtx: zero,
    };
    for (m, &w) in state.modes.iter().zip(&state.frequencies) {
        let k = cfg.wavenumber(m.n);
        let phase = Complex::new((w * t).cos(), -(w * t).sin());
        let c = m.amplitude * phase * norm;
        let (sn, cs) = (k * x).sin_cos();
        let minus_iw = Complex::new(T::zero(), -w);
        let u = c * sn;
        let ux = c * (k * cs);
        s.value = s.value + u;
        s.dt = s.dt + u * minus_iw;
        s.dx = s.dx + ux;
        s.dtt = s.dtt - u * (w * w);
        s.dxx = s.dxx - u * (k * k);
        s.dtx = s.dtx + ux * minus_iw;
    }
    Ok(s)
}

/// Polar decomposition `Φ = e^{P + iS}` with covariant gradients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarSample<T> {
    pub x: T,
    pub t: T,
    /// `R = |Φ|`.
    pub amplitude: T,
    /// `P = ln R`.
    pub log_amplitude: T,
    /// Principal value of `arg Φ`.
    pub phase: T,
    /// Covariant `(S_0, S_1)`.
    pub s_cov: [T; 2],
    /// Covariant `(P_0, P_1)`.
    pub p_cov: [T; 2],
    /// `□R / R`.
    pub box_r_over_r: T,
    pub near_node: bool,
}

impl<T: Real> PolarSample<T> {
    /// Contravariant `(S⁰, S¹) = (S_0, −S_1)`.
    pub fn s_upper(&self) -> TwoVector<T> {
        TwoVector::new(self.s_cov[0], -self.s_cov[1])
    }

    /// Contravariant `(P⁰, P¹) = (P_0, −P_1)`.
    pub fn p_upper(&self) -> TwoVector<T> {
        TwoVector::new(self.p_cov[0], -self.p_cov[1])
    }

    /// `S_μ S^μ`.
    pub fn s_sq(&self) -> T {
        self.s_cov[0] * self.s_cov[0] - self.s_cov[1] * self.s_cov[1]
    }

    /// `P_μ P^μ`.
    pub fn p_sq(&self) -> T {
        self.p_cov[0] * self.p_cov[0] - self.p_cov[1] * self.p_cov[1]
    }

    /// `P_μ S^μ`.
    pub fn p_dot_s(&self) -> T {
        self.p_cov[0] * self.s_cov[0] - self.p_cov[1] * self.s_cov[1]
    }

    pub fn density(&self) -> T {
        self.amplitude * self.amplitude
    }

    /// Returns the sample, or a node error when its gradients are unreliable.
    pub fn regular(&self) -> Result<&Self> {
        if self.near_node {
            Err(Error::NearNode {
                x: self.x.to_f64().unwrap_or(f64::NAN),
                t: self.t.to_f64().unwrap_or(f64::NAN),
                amplitude: self.amplitude.to_f64().unwrap_or(f64::NAN),
            })
        } else {
            Ok(self)
        }
    }
}

/// Polar decomposition of a field sample.
///
/// Points with `R < eps_node` are flagged `near_node`; if `R` is exactly zero
/// the gradient fields are zeroed instead of dividing by zero.
pub fn polar<T: Real>(sample: &FieldSample<T>, eps_node: T) -> PolarSample<T> {
    let r = sample.value.norm();
    let near_node = !(r >= eps_node) || r == T::zero();
    let phase = sample.value.im.atan2(sample.value.re);
    if r == T::zero() {
        return PolarSample {
            x: sample.x,
            t: sample.t,
            amplitude: r,
            log_amplitude: T::neg_infinity(),
            phase,
            s_cov: [T::zero(); 2],
            p_cov: [T::zero(); 2],
            box_r_over_r: T::zero(),
            near_node: true,
        };
    }
    let qt = sample.dt / sample.value;
    let qx = sample.dx / sample.value;
    let s_cov = [qt.im, qx.im];
    let p_cov = [qt.re, qx.re];
    let s_sq = s_cov[0] * s_cov[0] - s_cov[1] * s_cov[1];
    let box_ratio = sample.dalembertian() / sample.value;
    PolarSample {
        x: sample.x,
        t: sample.t,
        amplitude: r,
        log_amplitude: r.ln(),
        phase,
        s_cov,
        p_cov,
        box_r_over_r: box_ratio.re + s_sq,
        near_node,
    }
}

/// Time component of the current, `J⁰ = −|Φ|² Im(∂ₜΦ/Φ) / m0`.
///
/// Evaluated as `−Im(Φ* ∂ₜΦ)/m0`, which equals the quotient form away from
/// nodes and is exactly zero at them.
pub fn j0<T: Real>(state: &WaveState<T>, x: T, t: T) -> Result<T> {
    let m0 = state.rest_mass();
    if !(m0 > T::zero()) {
        return Err(Error::MasslessCurrent);
    }
    let (w0, _) = state.weighted_phase_gradient(x, t)?;
    Ok(-w0 / m0)
}

/// Residuals of the continuity and Hamilton-Jacobi equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals<T> {
    /// `∂^μ(R² S_μ)`.
    pub continuity: T,
    /// `S_μS^μ − □R/R − m0²`.
    pub hamilton_jacobi: T,
}

/// Both analytic residuals at `(x, t)`; zero for exact solutions.
pub fn residuals<T: Real>(state: &WaveState<T>, x: T, t: T, eps_node: T) -> Result<Residuals<T>> {
    let f = eval_field(state, x, t)?;
    let p = polar(&f, eps_node);
    p.regular()?;
    // ∂_ν(R² S_μ) = Im(∂_νΦ* ∂_μΦ + Φ* ∂_ν∂_μΦ), contracted with g^{μν}.
    let vc = f.value.conj();
    let first = f.dt.conj() * f.dt - f.dx.conj() * f.dx;
    let second = vc * (f.dtt - f.dxx);
    let continuity = (first + second).im;
    let m0 = state.rest_mass();
    let hamilton_jacobi = p.s_sq() - p.box_r_over_r - m0 * m0;
    Ok(Residuals {
        continuity,
        hamilton_jacobi,
    })
}

/// Squared effective rest mass `m0² + □R/R`; negative values mark an
/// imaginary rest mass.
pub fn effective_mass_sq<T: Real>(state: &WaveState<T>, x: T, t: T, eps_node: T) -> Result<T> {
    let p = state.polar_at(x, t, eps_node)?;
    p.regular()?;
    let m0 = state.rest_mass();
    Ok(m0 * m0 + p.box_r_over_r)
}
