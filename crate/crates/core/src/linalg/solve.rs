//! Direct linear solves: Cholesky for SPD systems and Gaussian elimination
//! with partial pivoting for general square systems.

use super::matrix::{DenseMatrix, LinalgError};

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: DenseMatrix,
}

impl CholeskyFactor {
    pub fn new(s: &DenseMatrix) -> Result<Self, LinalgError> {
        if !s.is_square() {
            return Err(LinalgError::NotSquare { rows: s.rows(), cols: s.cols() });
        }
        let dev = s.symmetry_deviation()?;
        let scale = s.max_abs();
        if scale > 0.0 && dev > 1e-12 * scale {
            return Err(LinalgError::NotSymmetric { max_deviation: dev });
        }
        let n = s.rows();
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut diag = s.get(j, j);
            for k in 0..j {
                let ljk = l.get(j, k);
                diag -= ljk * ljk;
            }
            if !(diag > 0.0) {
                return Err(LinalgError::NotPositiveDefinite { pivot_index: j });
            }
            let ljj = diag.sqrt();
            l.set(j, j, ljj);
            for i in (j + 1)..n {
                let mut v = s.get(i, j);
                for k in 0..j {
                    v -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, v / ljj);
            }
        }
        Ok(Self { l })
    }

    /// Solves `S x = b` by forward then backward substitution.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
        let n = self.l.rows();
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, got: b.len() });
        }
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = b[i];
            for k in 0..i {
                acc -= self.l.get(i, k) * y[k];
            }
            y[i] = acc / self.l.get(i, i);
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            for k in (i + 1)..n {
                acc -= self.l.get(k, i) * x[k];
            }
            x[i] = acc / self.l.get(i, i);
        }
        Ok(x)
    }
}

/// Solves a symmetric positive-definite system via Cholesky.
pub fn solve_spd(s: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    CholeskyFactor::new(s)?.solve(b)
}

/// Solves a general square system by Gaussian elimination with partial
/// pivoting. No conditioning safeguards: a numerically singular matrix
/// produces whatever the elimination produces, which is the point when
/// demonstrating ill-posed collocation systems. Only an exactly zero pivot
/// column is reported as singular.
pub fn solve_general(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut m = a.clone();
    let mut x: Vec<f64> = b.to_vec();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = m.get(col, col).abs();
        for r in (col + 1)..n {
            let v = m.get(r, col).abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val == 0.0 {
            return Err(LinalgError::SingularMatrix { pivot_index: col });
        }
        if pivot_row != col {
            for j in 0..n {
                let tmp = m.get(col, j);
                m.set(col, j, m.get(pivot_row, j));
                m.set(pivot_row, j, tmp);
            }
            x.swap(col, pivot_row);
        }
        let inv_pivot = 1.0 / m.get(col, col);
        for r in (col + 1)..n {
            let factor = m.get(r, col) * inv_pivot;
            if factor == 0.0 {
                continue;
            }
            m.set(r, col, 0.0);
            for j in (col + 1)..n {
                m.set(r, j, m.get(r, j) - factor * m.get(col, j));
            }
            x[r] -= factor * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in (i + 1)..n {
            acc -= m.get(i, j) * x[j];
        }
        x[i] = acc / m.get(i, i);
    }
    Ok(x)
}
