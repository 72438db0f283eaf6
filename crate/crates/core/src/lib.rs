//! Spectral simulation and verification toolkit for the damped nonlinear
//! Schrödinger equation
//!
//! ```text
//! i ∂ₜu + Δu + i a(t) u = μ |u|^{p-1} u,   x ∈ [-L, L)^N periodic
//! ```
//!
//! with a nonnegative time-dependent damping `a(t)`.
//!
//! * [`grid`]: periodic box, FFT pair, norms and moments
//! * [`damping`]: damping profiles, `A(t)`, `inf A(t)/t`
//! * [`solver`]: Strang split-step integrator, gauge transform, checkpoints
//! * [`diagnostics`]: functionals along a run and residuals of their exact laws
//! * [`scattering`]: back-propagated profiles, Cauchy test, decay envelopes
//! * [`inequalities`]: exponents, sharp Gagliardo–Nirenberg constant, Grönwall and bootstrap verifiers
//! * [`experiments`]: config files, run directories, suites and convergence studies

pub mod damping;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod inequalities;
pub mod quadrature;
pub mod scattering;
pub mod solver;

pub use num_complex::Complex64;

pub use damping::{damping_scalars, DampingProfile, DampingScalars};
pub use diagnostics::{DiagnosticsRecord, IdentityReport, Model};
pub use error::{Error, Result};
pub use grid::{Field, Grid, SpectralField};
pub use solver::{evolve, Formulation, InitialDataSpec, SimConfig};
