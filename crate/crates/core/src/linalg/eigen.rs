//! Symmetric eigendecomposition via cyclic Jacobi rotations, plus spectral
//! matrix functions built on top of it.
//!
//! Jacobi is slower than tridiagonalization-based solvers but foolproof and
//! very accurate for the small dense matrices (n <= 64) this crate works with.

use super::matrix::{DenseMatrix, LinalgError};

/// Convergence threshold: off-diagonal Frobenius norm below `1e-13 * ||S||_F`.
const JACOBI_TOL: f64 = 1e-13;
/// Upper bound on full sweeps; Jacobi converges quadratically, so for n <= 64
/// a handful of sweeps suffices and hitting this bound signals bad input.
const MAX_SWEEPS: usize = 100;

/// Relative tolerance for accepting an input matrix as symmetric.
const SYMMETRY_TOL: f64 = 1e-12;

/// Eigendecomposition of a real symmetric matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SymEig {
    /// Eigenvalues in non-increasing order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered to match `eigenvalues`.
    pub eigenvectors: DenseMatrix,
}

impl SymEig {
    /// Reconstructs `V diag(lambda) V^T`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.eigenvalues.len();
        let mut out = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for (k, &lam) in self.eigenvalues.iter().enumerate() {
                    acc += lam * self.eigenvectors.get(i, k) * self.eigenvectors.get(j, k);
                }
                out.set(i, j, acc);
                out.set(j, i, acc);
            }
        }
        out
    }
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = a.get(i, j);
                acc += v * v;
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps annihilate each off-diagonal entry in turn with a plane rotation;
/// the accumulated rotations form the eigenvector matrix. Converges when the
/// off-diagonal Frobenius norm drops below `1e-13 * ||S||_F`.
pub fn sym_eig(s: &DenseMatrix) -> Result<SymEig, LinalgError> {
    if !s.is_square() {
        return Err(LinalgError::NotSquare { rows: s.rows(), cols: s.cols() });
    }
    let dev = s.symmetry_deviation()?;
    let scale = s.max_abs();
    if scale > 0.0 && dev > SYMMETRY_TOL * scale {
        return Err(LinalgError::NotSymmetric { max_deviation: dev });
    }

    let n = s.rows();
    let mut a = s.clone();
    // Work on the exactly symmetric average so rotations keep symmetry.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, avg);
            a.set(j, i, avg);
        }
    }
    let mut v = DenseMatrix::identity(n);
    let threshold = JACOBI_TOL * s.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut converged = off_diagonal_norm(&a) <= threshold;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;

                // A <- J^T A J on rows/columns p and q.
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - sn * akq);
                    a.set(k, q, sn * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - sn * aqk);
                    a.set(q, k, sn * apk + c * aqk);
                }
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - sn * vkq);
                    v.set(k, q, sn * vkp + c * vkq);
                }
            }
        }
        converged = off_diagonal_norm(&a) <= threshold;
    }
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).partial_cmp(&a.get(i, i)).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut eigenvectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors.set(k, dst, v.get(k, src));
        }
    }
    Ok(SymEig { eigenvalues, eigenvectors })
}

/// Relative clamp tolerance for slightly negative eigenvalues of a PSD matrix.
pub const PSD_CLAMP_TOL: f64 = 1e-12;

/// Real power of a symmetric positive-semidefinite matrix via its spectrum.
///
/// Eigenvalues in `[-1e-12 * max|lambda|, 0)` are clamped to zero; anything
/// more negative is rejected.
pub fn sym_matrix_power(s: &DenseMatrix, r: f64) -> Result<DenseMatrix, LinalgError> {
    if !(r >= 0.0) {
        return Err(LinalgError::InvalidInput(format!("power must be >= 0, got {r}")));
    }
    let eig = sym_eig(s)?;
    let powered = psd_eigenvalue_powers(&eig.eigenvalues, r)?;
    let n = eig.eigenvalues.len();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for (k, &lam_r) in powered.iter().enumerate() {
                acc += lam_r * eig.eigenvectors.get(i, k) * eig.eigenvectors.get(j, k);
            }
            out.set(i, j, acc);
            out.set(j, i, acc);
        }
    }
    Ok(out)
}

/// Clamp-and-raise helper shared by `sym_matrix_power` and the solvers.
pub fn psd_eigenvalue_powers(eigenvalues: &[f64], r: f64) -> Result<Vec<f64>, LinalgError> {
    let max_abs = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let clamp = PSD_CLAMP_TOL * max_abs;
    let mut out = Vec::with_capacity(eigenvalues.len());
    for &lam in eigenvalues {
        if lam < -clamp {
            return Err(LinalgError::NotPositiveSemidefinite { min_eigenvalue: lam });
        }
        out.push(lam.max(0.0).powf(r));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn identity_eigenvalues() {
        let eig = sym_eig(&DenseMatrix::identity(2)).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn diagonal_matrix_sorted_descending() {
        let eig = sym_eig(&DenseMatrix::from_diagonal(&[1.0, 4.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![4.0, 1.0]);
        // eigenvectors are unit axes up to sign
        assert_close(eig.eigenvectors.get(1, 0).abs(), 1.0, 1e-14);
        assert_close(eig.eigenvectors.get(0, 1).abs(), 1.0, 1e-14);
    }

    #[test]
    fn two_by_two_exchange_coupling() {
        // Characteristic polynomial lambda^2 - 4 lambda + 3 -> roots 3, 1.
        let s = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let eig = sym_eig(&s).unwrap();
        assert_close(eig.eigenvalues[0], 3.0, 1e-14);
        assert_close(eig.eigenvalues[1], 1.0, 1e-14);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let s = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(sym_eig(&s), Err(LinalgError::NotSymmetric { .. })));
        let rect = DenseMatrix::zeros(2, 3);
        assert!(matches!(sym_eig(&rect), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn reconstruction_of_random_symmetric() {
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..20 {
            let n = 5;
            let mut s = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = next();
                    s.set(i, j, v);
                    s.set(j, i, v);
                }
            }
            let eig = sym_eig(&s).unwrap();
            let rec = eig.reconstruct();
            let err = rec.sub(&s).unwrap().frobenius_norm() / s.frobenius_norm();
            assert!(err < 1e-10, "reconstruction error {err}");
            // orthonormal columns
            for a in 0..n {
                for b in 0..n {
                    let d: f64 = (0..n)
                        .map(|k| eig.eigenvectors.get(k, a) * eig.eigenvectors.get(k, b))
                        .sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert_close(d, want, 1e-10);
                }
            }
        }
    }

    #[test]
    fn power_sqrt_of_diagonal() {
        let s = DenseMatrix::from_diagonal(&[4.0, 9.0]);
        let half = sym_matrix_power(&s, 0.5).unwrap();
        assert_close(half.get(0, 0), 2.0, 1e-12);
        assert_close(half.get(1, 1), 3.0, 1e-12);
        assert_close(half.get(0, 1), 0.0, 1e-12);
    }

    #[test]
    fn power_one_is_identity_map() {
        let s = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let p = sym_matrix_power(&s, 1.0).unwrap();
        let err = p.sub(&s).unwrap().frobenius_norm() / s.frobenius_norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn power_two_matches_matrix_square() {
        let s = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let p = sym_matrix_power(&s, 2.0).unwrap();
        // direct multiply gives [[5,4],[4,5]]
        assert_close(p.get(0, 0), 5.0, 1e-12);
        assert_close(p.get(0, 1), 4.0, 1e-12);
        assert_close(p.get(1, 1), 5.0, 1e-12);
    }

    #[test]
    fn power_rejects_indefinite() {
        let s = DenseMatrix::from_diagonal(&[1.0, -0.5]);
        assert!(matches!(
            sym_matrix_power(&s, 0.5),
            Err(LinalgError::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn power_law_composes() {
        let mut rng = crate::rng::SplitMix64::new(0xeed);
        for _ in 0..4 {
            let s = crate::testing::random_symmetric_psd(5, &mut rng);
            for &(r1, r2) in &[(0.5, 0.5), (0.8, 1.0), (1.0, 2.0), (0.5, 2.0), (0.8, 0.8)] {
                let composed = sym_matrix_power(&s, r1)
                    .unwrap()
                    .matmul(&sym_matrix_power(&s, r2).unwrap())
                    .unwrap();
                let direct = sym_matrix_power(&s, r1 + r2).unwrap();
                let rel = composed.sub(&direct).unwrap().frobenius_norm()
                    / direct.frobenius_norm();
                assert!(rel < 1e-9, "r1={r1} r2={r2}: {rel}");
            }
        }
    }
}
