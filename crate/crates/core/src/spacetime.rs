//! Two-component vectors in 1+1 dimensional Minkowski space.
//!
//! Components are contravariant `(v⁰, v¹)` = `(t, x)`. The metric signature is
//! `(+, −)` throughout the crate, so a vector is time-like when its squared
//! norm is positive.

use serde::Serialize;

use crate::num::Real;

/// A contravariant two-vector `(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct TwoVector<T> {
    pub t: T,
    pub x: T,
}

impl<T: Real> TwoVector<T> {
    pub fn new(t: T, x: T) -> Self {
        Self { t, x }
    }

    /// Minkowski inner product with signature `(+, −)`.
    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        self.t * other.t - self.x * other.x
    }

    #[inline]
    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    /// Squared Euclidean length in the `(t, x)` plane.
    #[inline]
    pub fn euclid_sq(&self) -> T {
        self.t * self.t + self.x * self.x
    }

    #[inline]
    pub fn scale(&self, s: T) -> Self {
        Self::new(self.t * s, self.x * s)
    }

    #[inline]
    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.t + other.t, self.x + other.x)
    }

    #[inline]
    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.t - other.t, self.x - other.x)
    }

    /// Applies the Lorentz boost with rapidity `r`.
    pub fn boost(&self, r: T) -> Self {
        let (c, s) = (r.cosh(), r.sinh());
        Self::new(c * self.t + s * self.x, s * self.t + c * self.x)
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite()
    }
}

/// Rapidity of a non-null direction, measured from the axis it is closest to.
///
/// For a time-like vector this is `atanh(x/t)`; for a space-like vector it is
/// `atanh(t/x)`. Along a path whose tangent passes through a null direction
/// both branches diverge with the same sign, so differences of this quantity
/// taken across a null crossing stay finite.
pub fn axis_rapidity<T: Real>(v: &TwoVector<T>) -> T {
    if v.x.abs() < v.t.abs() {
        (v.x / v.t).atanh()
    } else {
        (v.t / v.x).atanh()
    }
}
