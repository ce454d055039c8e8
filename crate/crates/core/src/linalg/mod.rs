//! Dense real linear algebra: symmetric eigendecomposition, SVD, spectral
//! matrix functions and direct solves.
//!
//! Everything here is sized for the small collocation systems produced by the
//! problem constructors (n <= 64), so the implementations favour robustness
//! and testability over asymptotic speed.

mod eigen;
mod matrix;
mod solve;
mod svd;

pub use eigen::{psd_eigenvalue_powers, sym_eig, sym_matrix_power, SymEig, PSD_CLAMP_TOL};
pub use matrix::{axpy, dot, norm2, sub_vec, DenseMatrix, LinalgError};
pub use solve::{solve_general, solve_spd, CholeskyFactor};
pub use svd::{condition_number, singular_system, SingularSystem, RANK_TOL};
