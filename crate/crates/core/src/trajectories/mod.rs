//! Flow lines of the guidance laws in the `(x, t)` plane.
//!
//! Integration is fixed-step classical RK4 in the flow parameter `τ`. Along
//! the way the integrator watches for nodes, the box walls, degenerate flow
//! and sign changes of `S⁰`; afterwards the sampled polyline is searched for
//! self-intersections (space-time loops).

mod fermi;
mod gauss;
mod integrate;
mod intersect;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guidance::VelocityLaw;
use crate::num::{lit, Real};

pub use fermi::{fermi_transport, fermi_transport_with, DyadFrame, DEFAULT_NULL_FRACTION};
pub use gauss::{gauss_flux, GaussFlux, SpacetimeRect};
pub use integrate::integrate;
pub use intersect::detect_self_intersection;

/// Start of a flow line: position `x0` at coordinate time `t0`, with `τ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition<T> {
    pub x0: T,
    pub t0: T,
}

impl<T> InitialCondition<T> {
    pub fn new(x0: T, t0: T) -> Self {
        Self { x0, t0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig<T> {
    /// RK4 step in `τ`.
    pub step: T,
    pub max_steps: usize,
    /// Integration stops once `R` drops below this.
    pub eps_node: T,
    /// Distance below which loop closures count as intersections.
    pub eps_event: T,
    pub tau_span: T,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            step: lit(1e-3),
            max_steps: 10_000_000,
            eps_node: lit(1e-3),
            eps_event: lit(1e-6),
            tau_span: lit(2.0),
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > T::zero()) || !self.step.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "step must be > 0, got {}",
                self.step
            )));
        }
        if self.max_steps < 1 {
            return Err(Error::InvalidConfig("max_steps must be >= 1".into()));
        }
        if !(self.tau_span >= T::zero()) || !self.tau_span.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "tau span must be >= 0, got {}",
                self.tau_span
            )));
        }
        if !(self.eps_node >= T::zero()) || !(self.eps_event >= T::zero()) {
            return Err(Error::InvalidConfig(
                "tolerances must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// One accepted integration point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample<T> {
    pub tau: T,
    pub x: T,
    pub t: T,
    pub dtau_t: T,
    pub dtau_x: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    S0SignChange,
    NodeProximity,
    BoundaryHit,
    SelfIntersection,
    DegenerateFlow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryEvent<T> {
    pub kind: EventKind,
    pub tau: T,
    pub x: T,
    pub t: T,
}

/// Why integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TauSpan,
    StepBudget,
    NodeProximity,
    BoundaryHit,
    DegenerateFlow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord<T> {
    pub law: VelocityLaw,
    pub samples: Vec<Sample<T>>,
    pub events: Vec<TrajectoryEvent<T>>,
    pub stop: StopReason,
}

impl<T: Real> TrajectoryRecord<T> {
    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    pub fn first(&self, kind: EventKind) -> Option<&TrajectoryEvent<T>> {
        self.events.iter().find(|e| e.kind == kind)
    }

    /// Whether coordinate time ever decreases between samples.
    pub fn t_is_monotone(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].t >= w[0].t)
    }

    /// Copy keeping only samples and events with `τ <= tau`.
    pub fn truncated(&self, tau: T) -> Self {
        Self {
            law: self.law,
            samples: self
                .samples
                .iter()
                .copied()
                .filter(|s| s.tau <= tau)
                .collect(),
            events: self
                .events
                .iter()
                .copied()
                .filter(|e| e.tau <= tau)
                .collect(),
            stop: self.stop,
        }
    }
}
