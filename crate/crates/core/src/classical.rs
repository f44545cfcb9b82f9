//! Covariant point-particle dynamics in an external field, 1+1 dimensions.
//!
//! The frame vector is the lab time axis, so the evolution parameter `X` is
//! coordinate time. With kinetic momentum `k = p − g a` (`a` the spatial
//! component of the potential, `g = ζe`) the equations of motion are
//!
//! ```text
//! H      = √(k² + m²)
//! dx/dX  = k / H
//! dp/dX  = g ∂ₓa · k / H
//! ```
//!
//! A constant electric field is represented in temporal gauge, `a = −E·X`,
//! so the force on the kinetic momentum is `dk/dX = gE`. The energy `ℰ` is
//! integrated alongside from `dℰ/dX = −g v ∂_X a`; its mass-shell mismatch
//! against `H` measures integration drift.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{lit, Real};

/// Drift of `ℰ²/H² − 1` beyond which integration aborts.
pub const SHELL_ABORT: f64 = 1e-6;

/// Sign `ζ` selecting particle (+1) or antiparticle (−1) motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Particle,
    Antiparticle,
}

impl Sector {
    pub fn zeta(self) -> i8 {
        match self {
            Sector::Particle => 1,
            Sector::Antiparticle => -1,
        }
    }

    pub fn from_zeta(zeta: i64) -> Result<Self> {
        match zeta {
            1 => Ok(Sector::Particle),
            -1 => Ok(Sector::Antiparticle),
            z => Err(Error::InvalidConfig(format!(
                "zeta must be +1 or -1, got {z}"
            ))),
        }
    }
}

/// Static potential sampled on a grid, interpolated by cubic Hermite segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedPotential<T> {
    pub xs: Vec<T>,
    pub values: Vec<T>,
    pub gradients: Vec<T>,
}

impl<T: Real> TabulatedPotential<T> {
    pub fn new(xs: Vec<T>, values: Vec<T>, gradients: Vec<T>) -> Result<Self> {
        if xs.len() < 2 || values.len() != xs.len() || gradients.len() != xs.len() {
            return Err(Error::InvalidConfig(
                "tabulated potential needs >= 2 points and matching columns".into(),
            ));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig(
                "tabulated grid must be strictly increasing".into(),
            ));
        }
        if xs
            .iter()
            .chain(&values)
            .chain(&gradients)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidConfig(
                "tabulated potential has non-finite entries".into(),
            ));
        }
        Ok(Self {
            xs,
            values,
            gradients,
        })
    }

    /// Samples `f` and its derivative `df` on `n` equally spaced points.
    pub fn sample(
        f: impl Fn(T) -> T,
        df: impl Fn(T) -> T,
        range: (T, T),
        n: usize,
    ) -> Result<Self> {
        let n = n.max(2);
        let xs: Vec<T> = (0..n)
            .map(|i| range.0 + (range.1 - range.0) * T::count(i) / T::count(n - 1))
            .collect();
        let values = xs.iter().map(|&x| f(x)).collect();
        let gradients = xs.iter().map(|&x| df(x)).collect();
        Self::new(xs, values, gradients)
    }

    /// Value and slope at `x`.
    pub fn eval(&self, x: T) -> Result<(T, T)> {
        let (lo, hi) = (self.xs[0], *self.xs.last().unwrap());
        if !(x >= lo && x <= hi) {
            return Err(Error::InvalidConfig(format!(
                "position {x} outside tabulated range [{lo}, {hi}]"
            )));
        }
        let i = self
            .xs
            .partition_point(|&g| g <= x)
            .clamp(1, self.xs.len() - 1)
            - 1;
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.gradients[i] * h, self.gradients[i + 1] * h);
        let (one, two, three) = (T::one(), lit::<T>(2.0), lit::<T>(3.0));
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (two * s3 - three * s2 + one) * y0
            + (s3 - two * s2 + s) * m0
            + (three * s2 - two * s3) * y1
            + (s3 - s2) * m1;
        let six = lit::<T>(6.0);
        let d = (six * s2 - six * s) * (y0 - y1)
            + (three * s2 - lit::<T>(4.0) * s + one) * m0
            + (three * s2 - two * s) * m1;
        Ok((v, d / h))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PotentialSpec<T> {
    Zero,
    ConstantElectric { field: T },
    Tabulated(TabulatedPotential<T>),
}

impl<T: Real> PotentialSpec<T> {
    /// `(a, ∂ₓa, ∂_X a)` at position `x` and time `time`.
    pub fn eval(&self, x: T, time: T) -> Result<(T, T, T)> {
        match self {
            PotentialSpec::Zero => Ok((T::zero(), T::zero(), T::zero())),
            PotentialSpec::ConstantElectric { field } => Ok((-*field * time, T::zero(), -*field)),
            PotentialSpec::Tabulated(tab) => tab.eval(x).map(|(a, ax)| (a, ax, T::zero())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState<T> {
    pub x: T,
    /// Canonical spatial momentum.
    pub momentum: T,
    pub sector: Sector,
    /// Physical time `X`.
    pub time: T,
    pub charge: T,
    pub mass: T,
}

impl<T: Real> ClassicalState<T> {
    pub fn coupling(&self) -> T {
        self.charge * lit(f64::from(self.sector.zeta()))
    }

    fn validate(&self) -> Result<()> {
        let all = [self.x, self.momentum, self.time, self.charge, self.mass];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "classical state has non-finite fields".into(),
            ));
        }
        if !(self.mass > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "mass must be > 0, got {}",
                self.mass
            )));
        }
        Ok(())
    }
}

/// `√(k² + m²)`, guarded against loss of reality.
fn shell<T: Real>(k: T, m: T) -> Result<T> {
    let h2 = k * k + m * m;
    if !(h2 > T::zero()) || !h2.is_finite() {
        return Err(Error::ConstraintViolation(format!(
            "H² = {h2} is not positive"
        )));
    }
    Ok(h2.sqrt())
}

/// `(dx/dX, dp/dX)` at state `s`.
pub fn classical_derivs<T: Real>(s: &ClassicalState<T>, pot: &PotentialSpec<T>) -> Result<(T, T)> {
    let g = s.coupling();
    let (a, ax, _) = pot.eval(s.x, s.time)?;
    let k = s.momentum - g * a;
    let h = shell(k, s.mass)?;
    Ok((k / h, g * ax * k / h))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalSample<T> {
    pub time: T,
    pub x: T,
    pub momentum: T,
    /// `√((p − g a)² + m²)`.
    pub hamiltonian: T,
    /// `|ℰ²/H² − 1|` for the independently integrated energy `ℰ`.
    pub shell_drift: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalPath<T> {
    pub sector: Sector,
    pub samples: Vec<ClassicalSample<T>>,
}

impl<T: Real> ClassicalPath<T> {
    pub fn max_shell_drift(&self) -> T {
        self.samples
            .iter()
            .fold(T::zero(), |m, s| m.max(s.shell_drift))
    }

    /// Largest `|dx/dX|` implied by the recorded momenta.
    pub fn max_speed(&self, s0: &ClassicalState<T>, pot: &PotentialSpec<T>) -> Result<T> {
        let mut worst = T::zero();
        for p in &self.samples {
            let s = ClassicalState {
                x: p.x,
                momentum: p.momentum,
                time: p.time,
                ..*s0
            };
            worst = worst.max(classical_derivs(&s, pot)?.0.abs());
        }
        Ok(worst)
    }
}

/// RK4 in physical time over `[s0.time, s0.time + x_span]`.
///
/// The step count is `round(x_span / h)`. Integration aborts with
/// [`Error::ConstraintViolation`] once the mass-shell drift exceeds
/// [`SHELL_ABORT`].
pub fn integrate_classical<T: Real>(
    s0: &ClassicalState<T>,
    pot: &PotentialSpec<T>,
    x_span: T,
    h: T,
) -> Result<ClassicalPath<T>> {
    s0.validate()?;
    if !(h > T::zero()) || !h.is_finite() || !(x_span >= T::zero()) || !x_span.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "need h > 0 and span >= 0, got h = {h}, span = {x_span}"
        )));
    }
    let g = s0.coupling();
    let m = s0.mass;
    // State (x, p, ℰ) as a function of X.
    let rhs = |time: T, y: [T; 3]| -> Result<[T; 3]> {
        let (a, ax, a_time) = pot.eval(y[0], time)?;
        let k = y[1] - g * a;
        let hh = shell(k, m)?;
        let v = k / hh;
        Ok([v, g * ax * v, -g * v * a_time])
    };
    let sample = |time: T, y: [T; 3]| -> Result<ClassicalSample<T>> {
        let (a, _, _) = pot.eval(y[0], time)?;
        let hh = shell(y[1] - g * a, m)?;
        let r = y[2] / hh;
        Ok(ClassicalSample {
            time,
            x: y[0],
            momentum: y[1],
            hamiltonian: hh,
            shell_drift: (r * r - T::one()).abs(),
        })
    };

    let (a0, _, _) = pot.eval(s0.x, s0.time)?;
    let mut y = [s0.x, s0.momentum, shell(s0.momentum - g * a0, m)?];
    let n = (x_span / h).round().to_usize().unwrap_or(0);
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(sample(s0.time, y)?);
    let (half, sixth, two) = (h / lit(2.0), h / lit(6.0), lit::<T>(2.0));
    let axpy = |y: [T; 3], s: T, k: [T; 3]| [y[0] + s * k[0], y[1] + s * k[1], y[2] + s * k[2]];
    for i in 0..n {
        let time = s0.time + h * T::count(i);
        let k1 = rhs(time, y)?;
        let k2 = rhs(time + half, axpy(y, half, k1))?;
        let k3 = rhs(time + half, axpy(y, half, k2))?;
        let k4 = rhs(time + h, axpy(y, h, k3))?;
        for c in 0..3 {
            y[c] = y[c] + sixth * (k1[c] + two * k2[c] + two * k3[c] + k4[c]);
        }
        let smp = sample(s0.time + h * T::count(i + 1), y)?;
        if !(smp.shell_drift <= lit(SHELL_ABORT)) {
            return Err(Error::ConstraintViolation(format!(
                "shell drift {} at X = {} exceeds {}",
                smp.shell_drift, smp.time, SHELL_ABORT
            )));
        }
        samples.push(smp);
    }
    Ok(ClassicalPath {
        sector: s0.sector,
        samples,
    })
}

/// Outcome of comparing the `(ζ = −1, e)` and `(ζ = +1, −e)` paths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConjugationReport<T> {
    pub max_deviation: T,
    pub agree: bool,
}

/// Pointwise agreement tolerance for [`charge_conjugation_check`].
pub const CONJUGATION_TOLERANCE: f64 = 1e-12;

/// Integrates `s0` as an antiparticle of charge `e` and as a particle of
/// charge `−e` and compares positions and momenta sample by sample.
pub fn charge_conjugation_check<T: Real>(
    s0: &ClassicalState<T>,
    pot: &PotentialSpec<T>,
    x_span: T,
    h: T,
) -> Result<ConjugationReport<T>> {
    let anti = ClassicalState {
        sector: Sector::Antiparticle,
        ..*s0
    };
    let flipped = ClassicalState {
        sector: Sector::Particle,
        charge: -s0.charge,
        ..*s0
    };
    let a = integrate_classical(&anti, pot, x_span, h)?;
    let b = integrate_classical(&flipped, pot, x_span, h)?;
    let max_deviation = a
        .samples
        .iter()
        .zip(&b.samples)
        .fold(T::zero(), |m, (p, q)| {
            m.max((p.x - q.x).abs())
                .max((p.momentum - q.momentum).abs())
        });
    Ok(ConjugationReport {
        max_deviation,
        agree: max_deviation <= lit(CONJUGATION_TOLERANCE),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rest(x: f64) -> ClassicalState<f64> {
        ClassicalState {
            x,
            momentum: 0.0,
            sector: Sector::Particle,
            time: 0.0,
            charge: 1.0,
            mass: 1.0,
        }
    }

    #[test]
    fn at_rest_without_field() {
        assert_eq!(
            classical_derivs(&rest(0.3), &PotentialSpec::Zero).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn free_velocity_is_subluminal() {
        for p in [-1e6, -3.0, 0.5, 40.0] {
            let s = ClassicalState {
                momentum: p,
                ..rest(0.0)
            };
            let (v, f) = classical_derivs(&s, &PotentialSpec::Zero).unwrap();
            assert!((v - p / (p * p + 1.0).sqrt()).abs() < 1e-15);
            assert!(v.abs() < 1.0 && f == 0.0);
        }
    }

    #[test]
    fn free_path_is_straight() {
        let s = ClassicalState {
            momentum: 0.75,
            ..rest(0.0)
        };
        let path = integrate_classical(&s, &PotentialSpec::Zero, 3.0, 1e-2).unwrap();
        let last = path.samples.last().unwrap();
        assert!((last.momentum - 0.75).abs() < 1e-12);
        assert!((last.x - 0.6 * 3.0).abs() < 1e-12);
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let tab = TabulatedPotential::sample(
            |x: f64| x * x * x - x,
            |x| 3.0 * x * x - 1.0,
            (-1.0, 2.0),
            4,
        )
        .unwrap();
        for x in [-1.0, -0.3, 0.0, 0.77, 2.0] {
            let (v, d) = tab.eval(x).unwrap();
            assert!((v - (x * x * x - x)).abs() < 1e-13);
            assert!((d - (3.0 * x * x - 1.0)).abs() < 1e-12);
        }
        assert!(tab.eval(2.1).is_err());
    }

    #[test]
    fn zeta_parsing() {
        assert_eq!(Sector::from_zeta(-1).unwrap(), Sector::Antiparticle);
        assert!(Sector::from_zeta(0).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = ClassicalState {
            mass: 0.0,
            ..rest(0.0)
        };
        assert!(integrate_classical(&s, &PotentialSpec::Zero, 1.0, 0.1).is_err());
        assert!(integrate_classical(&rest(0.0), &PotentialSpec::Zero, 1.0, -0.1).is_err());
    }
}
