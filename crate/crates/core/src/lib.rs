//! Pilot-wave dynamics for a Klein-Gordon field in a one-dimensional box.
//!
//! The field is a finite superposition of Dirichlet box modes evaluated in
//! closed form. On top of it the crate provides the polar decomposition, the
//! stress-energy tensor and its time-like eigenvector, three guidance laws,
//! flow-line integration with loop detection and Fermi-Walker frames, and a
//! covariant point-particle integrator in an external field.
//!
//! Every routine is generic over [`Real`] (`f32` or `f64`). The `*64` and
//! `*32` aliases below fix the scalar type.

// Negated comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod error;
pub mod guidance;
pub mod kgfield;
pub mod num;
pub mod spacetime;
pub mod stressenergy;
pub mod trajectories;

pub use num_complex::Complex;

pub use classical::{
    charge_conjugation_check, classical_derivs, integrate_classical, ClassicalPath,
    ClassicalSample, ClassicalState, ConjugationReport, PotentialSpec, Sector, TabulatedPotential,
};
pub use error::{Error, Result};
pub use guidance::{
    effective_mass_negative_intervals, flow_field, negativity_scan, roots_of_s0,
    superluminal_intervals, v_debroglie, v_modified, FlowVector, VelocityLaw,
};
pub use kgfield::{
    eval_field, j0, omega, polar, residuals, BoxConfig, FieldSample, ModeSpec, PolarSample,
    Residuals, WaveState,
};
pub use num::Real;
pub use spacetime::TwoVector;
pub use stressenergy::{
    eigen_flow, stress_tensor, v_energy, v_theta, EigenFlow, FlowEigenpair, StressTensor,
};
pub use trajectories::{
    detect_self_intersection, fermi_transport, gauss_flux, integrate, DyadFrame, EventKind,
    GaussFlux, InitialCondition, IntegratorConfig, SpacetimeRect, StopReason, TrajectoryEvent,
    TrajectoryRecord,
};

pub type BoxConfig64 = BoxConfig<f64>;
pub type WaveState64 = WaveState<f64>;
pub type PolarSample64 = PolarSample<f64>;
pub type IntegratorConfig64 = IntegratorConfig<f64>;
pub type TrajectoryRecord64 = TrajectoryRecord<f64>;
pub type ClassicalState64 = ClassicalState<f64>;

pub type BoxConfig32 = BoxConfig<f32>;
pub type WaveState32 = WaveState<f32>;
pub type PolarSample32 = PolarSample<f32>;
pub type IntegratorConfig32 = IntegratorConfig<f32>;
pub type TrajectoryRecord32 = TrajectoryRecord<f32>;
pub type ClassicalState32 = ClassicalState<f32>;
