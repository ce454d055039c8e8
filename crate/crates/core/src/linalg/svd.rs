//! Singular value decomposition via the symmetric eigendecomposition of
//! `A^T A`, with left vectors recovered as `A v / ||A v||`.
//!
//! This is adequate at desk scale (n <= 64): singular values below roughly
//! `sqrt(eps) * mu_1` lose relative accuracy, which is expected and handled by
//! treating everything below `1e-14 * mu_1` as rank-deficient.

use super::eigen::sym_eig;
use super::matrix::{norm2, DenseMatrix, LinalgError};

/// Relative threshold below which a singular value counts as numerically zero.
pub const RANK_TOL: f64 = 1e-14;

/// Discrete singular system `(mu_j, v_j, u_j)` with `A v_j = mu_j u_j`.
#[derive(Debug, Clone)]
pub struct SingularSystem {
    /// Singular values, non-increasing and non-negative.
    pub mu: Vec<f64>,
    /// Left singular vectors as columns (`rows x k`).
    pub left_vectors: DenseMatrix,
    /// Right singular vectors as columns (`cols x k`).
    pub right_vectors: DenseMatrix,
}

impl SingularSystem {
    /// Largest singular value.
    pub fn mu1(&self) -> f64 {
        self.mu[0]
    }

    /// Number of singular triplets, `min(rows, cols)`.
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// True when `mu_j` is above the numerical-rank threshold.
    pub fn is_significant(&self, j: usize) -> bool {
        self.mu[j] >= RANK_TOL * self.mu1()
    }

    pub fn left_vector(&self, j: usize) -> Vec<f64> {
        self.left_vectors.col(j)
    }

    pub fn right_vector(&self, j: usize) -> Vec<f64> {
        self.right_vectors.col(j)
    }

    /// `U diag(mu) V^T`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let m = self.left_vectors.rows();
        let n = self.right_vectors.rows();
        let mut out = DenseMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                let mut acc = 0.0;
                for (k, &mu) in self.mu.iter().enumerate() {
                    acc += mu * self.left_vectors.get(i, k) * self.right_vectors.get(j, k);
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

/// Computes the singular system of a general dense matrix.
pub fn singular_system(a: &DenseMatrix) -> Result<SingularSystem, LinalgError> {
    let m = a.rows();
    let n = a.cols();
    let k = m.min(n);

    let eig = sym_eig(&a.gram())?;
    let lambda_max = eig.eigenvalues[0].max(0.0);
    let mu: Vec<f64> = eig.eigenvalues[..k]
        .iter()
        .map(|&lam| lam.max(0.0).sqrt())
        .collect();
    let mu1 = mu[0];

    let mut right_vectors = DenseMatrix::zeros(n, k);
    for j in 0..k {
        for i in 0..n {
            right_vectors.set(i, j, eig.eigenvectors.get(i, j));
        }
    }

    // Left vectors: normalize A v_j where mu_j is significant, complete the
    // basis elsewhere, then two Gram-Schmidt passes so U stays orthonormal
    // even when trailing directions are at roundoff level.
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let candidate = if lambda_max > 0.0 && mu[j] >= RANK_TOL * mu1 {
            let w = a.matvec(&right_vectors.col(j))?;
            let nw = norm2(&w);
            if nw > 0.0 {
                Some(w.iter().map(|v| v / nw).collect::<Vec<f64>>())
            } else {
                None
            }
        } else {
            None
        };
        let col = match candidate {
            Some(w) => orthonormalize(w, &u_cols, m),
            None => complete_direction(&u_cols, m),
        };
        u_cols.push(col);
    }

    let mut left_vectors = DenseMatrix::zeros(m, k);
    for (j, col) in u_cols.iter().enumerate() {
        for i in 0..m {
            left_vectors.set(i, j, col[i]);
        }
    }

    Ok(SingularSystem { mu, left_vectors, right_vectors })
}

/// Projects out the span of `basis` twice and renormalizes; falls back to a
/// fresh completion vector when the projection collapses the candidate.
fn orthonormalize(mut w: Vec<f64>, basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    for _ in 0..2 {
        for b in basis {
            let overlap: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= overlap * bi;
            }
        }
        let nw = norm2(&w);
        if nw < 1e-6 {
            return complete_direction(basis, dim);
        }
        for wi in w.iter_mut() {
            *wi /= nw;
        }
    }
    w
}

/// Picks the coordinate axis least represented in `basis` and orthonormalizes it.
fn complete_direction(basis: &[Vec<f64>], dim: usize) -> Vec<f64> {
    let mut best_axis = 0;
    let mut best_residual = -1.0;
    for axis in 0..dim {
        let projected: f64 = basis.iter().map(|b| b[axis] * b[axis]).sum();
        let residual = 1.0 - projected;
        if residual > best_residual {
            best_residual = residual;
            best_axis = axis;
        }
    }
    let mut w = vec![0.0; dim];
    w[best_axis] = 1.0;
    for _ in 0..2 {
        for b in basis {
            let overlap: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= overlap * bi;
            }
        }
        let nw = norm2(&w);
        assert!(nw > 1e-8, "basis completion failed");
        for wi in w.iter_mut() {
            *wi /= nw;
        }
    }
    w
}

/// Spectral condition number `mu_1 / mu_min`.
///
/// Returns `f64::INFINITY` when the smallest singular value falls below the
/// numerical-rank threshold; at that point the true ratio is unobservable in
/// double precision and the matrix behaves as singular.
pub fn condition_number(a: &DenseMatrix) -> Result<f64, LinalgError> {
    let sys = singular_system(a)?;
    let mu1 = sys.mu1();
    if mu1 == 0.0 {
        return Err(LinalgError::InvalidInput("condition number of zero matrix".into()));
    }
    let mu_min = *sys.mu.last().unwrap();
    if mu_min < RANK_TOL * mu1 {
        return Ok(f64::INFINITY);
    }
    Ok(mu1 / mu_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::dot;

    fn check_system(a: &DenseMatrix, sys: &SingularSystem, tol: f64) {
        // descending, non-negative
        for j in 0..sys.len() {
            assert!(sys.mu[j] >= 0.0);
            if j > 0 {
                assert!(sys.mu[j - 1] >= sys.mu[j]);
            }
        }
        // A v_j = mu_j u_j
        let mu1 = sys.mu1();
        for j in 0..sys.len() {
            let av = a.matvec(&sys.right_vector(j)).unwrap();
            let mut dev = 0.0_f64;
            for (i, avi) in av.iter().enumerate() {
                dev = dev.max((avi - sys.mu[j] * sys.left_vectors.get(i, j)).abs());
            }
            assert!(dev <= tol * mu1.max(1.0), "A v = mu u failed at {j}: {dev}");
        }
        // orthonormality of both vector sets
        for cols in [&sys.left_vectors, &sys.right_vectors] {
            for p in 0..sys.len() {
                for q in p..sys.len() {
                    let d = dot(&cols.col(p), &cols.col(q));
                    let want = if p == q { 1.0 } else { 0.0 };
                    assert!((d - want).abs() < 1e-10, "orthonormality {p},{q}: {d}");
                }
            }
        }
    }

    #[test]
    fn identity_all_ones() {
        let a = DenseMatrix::identity(3);
        let sys = singular_system(&a).unwrap();
        assert_eq!(sys.mu, vec![1.0, 1.0, 1.0]);
        check_system(&a, &sys, 1e-10);
    }

    #[test]
    fn permutation_matrix_unit_singular_values() {
        let a = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let sys = singular_system(&a).unwrap();
        assert!((sys.mu[0] - 1.0).abs() < 1e-12);
        assert!((sys.mu[1] - 1.0).abs() < 1e-12);
        check_system(&a, &sys, 1e-10);
    }

    #[test]
    fn signed_diagonal_absorbs_sign_into_vector() {
        let a = DenseMatrix::from_diagonal(&[3.0, -2.0]);
        let sys = singular_system(&a).unwrap();
        assert!((sys.mu[0] - 3.0).abs() < 1e-12);
        assert!((sys.mu[1] - 2.0).abs() < 1e-12);
        // second left vector must carry the sign: A v = -2 e2 * v_sign
        check_system(&a, &sys, 1e-10);
        let rec = sys.reconstruct();
        assert!(rec.sub(&a).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn rectangular_shapes() {
        let tall = DenseMatrix::from_rows(&[&[1.0, 0.5], &[0.0, 2.0], &[1.0, -1.0]]);
        let sys = singular_system(&tall).unwrap();
        assert_eq!(sys.len(), 2);
        check_system(&tall, &sys, 1e-10);
        let rec_err = sys.reconstruct().sub(&tall).unwrap().frobenius_norm()
            / tall.frobenius_norm();
        assert!(rec_err < 1e-10);

        let wide = tall.transpose();
        let sys = singular_system(&wide).unwrap();
        assert_eq!(sys.len(), 2);
        check_system(&wide, &sys, 1e-10);
    }

    #[test]
    fn rank_deficient_matrix_completes_basis() {
        let a = DenseMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let sys = singular_system(&a).unwrap();
        assert!((sys.mu[0] - 2.0).abs() < 1e-12);
        assert!(sys.mu[1].abs() < 1e-12);
        check_system(&a, &sys, 1e-10);
        let rec_err = sys.reconstruct().sub(&a).unwrap().frobenius_norm();
        assert!(rec_err < 1e-12);
    }

    #[test]
    fn psd_singular_values_equal_eigenvalues() {
        let mut rng = crate::rng::SplitMix64::new(0xabc);
        for _ in 0..5 {
            let s = crate::testing::random_symmetric_psd(5, &mut rng);
            let eig = crate::linalg::sym_eig(&s).unwrap();
            let sys = singular_system(&s).unwrap();
            for (mu, lam) in sys.mu.iter().zip(&eig.eigenvalues) {
                assert!((mu - lam).abs() < 1e-10 * sys.mu1().max(1.0), "{mu} vs {lam}");
            }
        }
    }

    #[test]
    fn spd_solve_residual_scales_with_condition() {
        let mut rng = crate::rng::SplitMix64::new(0xdef);
        // condition about 1e4 and about 1e6
        for lambda_min in [1e-4, 1e-6] {
            let s = crate::testing::random_symmetric_psd_with_spectrum(6, lambda_min, 1.0, &mut rng);
            let b: Vec<f64> = crate::testing::random_vector(6, &mut rng);
            let x = crate::linalg::solve_spd(&s, &b).unwrap();
            let r = crate::linalg::sub_vec(&s.matvec(&x).unwrap(), &b);
            let cond = condition_number(&s).unwrap();
            assert!(
                crate::linalg::norm2(&r) <= 1e-10 * crate::linalg::norm2(&b) * cond,
                "residual {} vs bound",
                crate::linalg::norm2(&r)
            );
        }
    }

    #[test]
    fn condition_number_basics() {
        assert_eq!(condition_number(&DenseMatrix::identity(4)).unwrap(), 1.0);
        let c = condition_number(&DenseMatrix::from_diagonal(&[10.0, 1.0])).unwrap();
        assert!((c - 10.0).abs() < 1e-12);
        let zero = DenseMatrix::zeros(2, 2);
        assert!(condition_number(&zero).is_err());
        let singular = DenseMatrix::from_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(condition_number(&singular).unwrap().is_infinite());
    }
}
