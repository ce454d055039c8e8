//! Filter-based regularization methods for discrete ill-posed linear
//! problems.
//!
//! The crate provides:
//!
//! - [`linalg`]: dense symmetric eigendecomposition (cyclic Jacobi), SVD,
//!   spectral matrix powers and direct solves;
//! - [`filters`]: the spectral filter functions of the Tikhonov, Landweber,
//!   weighted and fractional families, plus numeric verification of the
//!   regularizing-filter and order-optimality conditions;
//! - [`solvers`]: regularized solutions through a singular system or through
//!   the literal iterative schemes, with a-priori parameter-choice rules;
//! - [`problems`]: two Fredholm first-kind collocation problems (a Laplace
//!   kernel on the half line and a Simpson-rule system on the unit interval)
//!   and the seeded noise model;
//! - [`experiments`]: parameter sweeps, iteration comparisons, L-curve data,
//!   method comparison tables and convergence-rate estimation, all emitting
//!   deterministic CSV/JSON records.

pub mod experiments;
pub mod filters;
pub mod linalg;
pub mod problems;
pub mod rng;
pub mod solvers;
pub mod testing;
