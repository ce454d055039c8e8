//! Row-major dense matrix type and the handful of vector helpers the rest of
//! the crate builds on.

use std::fmt;

/// Error type for dense linear algebra operations.
#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// Operation requires a square matrix.
    NotSquare { rows: usize, cols: usize },
    /// Matrix is not symmetric within the required tolerance.
    NotSymmetric { max_deviation: f64 },
    /// Matrix has an eigenvalue below the negative-clamp tolerance.
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    /// Cholesky factorization hit a non-positive pivot.
    NotPositiveDefinite { pivot_index: usize },
    /// Gaussian elimination found an exactly zero pivot column.
    SingularMatrix { pivot_index: usize },
    /// Operand shapes do not match.
    DimensionMismatch { expected: usize, got: usize },
    /// Input is empty, all-zero or otherwise unusable.
    InvalidInput(String),
    /// The eigensolver did not reach its convergence threshold.
    NoConvergence { sweeps: usize },
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::NotSquare { rows, cols } => {
                write!(f, "matrix must be square, got {rows}x{cols}")
            }
            LinalgError::NotSymmetric { max_deviation } => {
                write!(f, "matrix is not symmetric, max |a_ij - a_ji| = {max_deviation:e}")
            }
            LinalgError::NotPositiveSemidefinite { min_eigenvalue } => {
                write!(f, "matrix is not positive semidefinite, min eigenvalue {min_eigenvalue:e}")
            }
            LinalgError::NotPositiveDefinite { pivot_index } => {
                write!(f, "matrix is not positive definite (pivot {pivot_index})")
            }
            LinalgError::SingularMatrix { pivot_index } => {
                write!(f, "matrix is singular (zero pivot at column {pivot_index})")
            }
            LinalgError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            LinalgError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            LinalgError::NoConvergence { sweeps } => {
                write!(f, "eigensolver did not converge within {sweeps} sweeps")
            }
        }
    }
}

impl std::error::Error for LinalgError {}

/// Dense real matrix in row-major order.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries. All entries must be finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::InvalidInput("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch { expected: rows * cols, got: entries.len() });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Builds from a slice of rows; panics if the rows are ragged.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            entries.extend_from_slice(row);
        }
        Self { rows: r, cols: c, entries }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` copied out as a vector.
    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: x.len() });
        }
        let mut y = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for j in 0..self.cols {
                acc += row[j] * x[j];
            }
            y[i] = acc;
        }
        Ok(y)
    }

    /// `Aᵀ x` without forming the transpose.
    pub fn matvec_transposed(&self, x: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if x.len() != self.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.rows, got: x.len() });
        }
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let xi = x[i];
            for j in 0..self.cols {
                y[j] += row[j] * xi;
            }
        }
        Ok(y)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.entries[i * other.cols + j] += aik * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// `AᵀA`, symmetrized exactly by mirroring the upper triangle.
    pub fn gram(&self) -> DenseMatrix {
        let n = self.cols;
        let mut g = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..self.rows {
                    acc += self.get(k, i) * self.get(k, j);
                }
                g.set(i, j, acc);
                g.set(j, i, acc);
            }
        }
        g
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                expected: self.rows * self.cols,
                got: other.rows * other.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
        self.add(&other.scale(-1.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest |a_ij - a_ji| over the strict upper triangle; zero for 1x1.
    pub fn symmetry_deviation(&self) -> Result<f64, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut dev = 0.0_f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                dev = dev.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        Ok(dev)
    }
}

/// Euclidean norm.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
