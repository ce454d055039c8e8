//! Discretized Fredholm first-kind test problems and the noise model.
//!
//! Two problems are provided:
//!
//! - a Laplace-kernel equation on the half line, collocated at Gauss-Laguerre
//!   nodes and symmetrized by the diagonal scaling `sqrt(w_j e^{t_j})`;
//! - a Simpson-rule collocation of `int_0^1 (1 + ts) e^{ts} x(s) ds = e^t`,
//!   whose unregularized solve blows up once the system is large enough.

use crate::linalg::{norm2, sub_vec, DenseMatrix, LinalgError};
use crate::rng::SplitMix64;
use std::fmt;

pub const MAX_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemError {
    /// Point count outside the supported range.
    SizeOutOfRange { n: usize, min: usize, max: usize },
    /// Simpson collocation needs an even number of subintervals.
    OddSubintervals { n: usize },
    Linalg(LinalgError),
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::SizeOutOfRange { n, min, max } => {
                write!(f, "point count {n} outside [{min}, {max}]")
            }
            ProblemError::OddSubintervals { n } => {
                write!(f, "Simpson rule needs an even subinterval count, got {n}")
            }
            ProblemError::Linalg(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ProblemError {}

impl From<LinalgError> for ProblemError {
    fn from(e: LinalgError) -> Self {
        ProblemError::Linalg(e)
    }
}

/// Which test problem a [`DiscreteProblem`] was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Laplace,
    Simpson,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemKind::Laplace => write!(f, "laplace"),
            ProblemKind::Simpson => write!(f, "simpson"),
        }
    }
}

impl std::str::FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "laplace" => Ok(ProblemKind::Laplace),
            "simpson" => Ok(ProblemKind::Simpson),
            other => Err(format!("unknown problem kind '{other}'")),
        }
    }
}

/// Quadrature-discretized first-kind integral equation.
///
/// `scaling` maps function values into the (possibly rescaled) coordinates the
/// matrix acts on: `x_scaled_j = scaling_j * x(t_j)`. It is all ones when the
/// collocation is used directly.
#[derive(Debug, Clone)]
pub struct DiscreteProblem {
    pub kind: ProblemKind,
    pub a: DenseMatrix,
    pub y_exact: Vec<f64>,
    pub x_exact: Vec<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaling: Vec<f64>,
    /// `||A x_exact - y_exact||_2` recorded at construction; this is the
    /// quadrature consistency error of the discretization.
    pub quadrature_defect: f64,
}

impl DiscreteProblem {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Converts a vector from scaled coordinates back to function values.
    pub fn unscale(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.scaling).map(|(v, s)| v / s).collect()
    }

    /// JSON document for cross-implementation comparison.
    pub fn to_json(&self) -> String {
        let doc = ProblemDocument {
            n: self.size(),
            kind: self.kind,
            matrix: self.a.entries().to_vec(),
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
            x_exact: self.x_exact.clone(),
            y_exact: self.y_exact.clone(),
            scaling: self.scaling.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("problem serialization cannot fail")
    }
}

/// Serialized form of a [`DiscreteProblem`]; `matrix` is row-major.
#[derive(Debug, serde::Serialize, serde::Deserialize)]
pub struct ProblemDocument {
    pub n: usize,
    pub kind: ProblemKind,
    pub matrix: Vec<f64>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub x_exact: Vec<f64>,
    pub y_exact: Vec<f64>,
    pub scaling: Vec<f64>,
}

/// Perturbed right-hand side with its noise level and seed.
#[derive(Debug, Clone)]
pub struct NoisySample {
    pub y_delta: Vec<f64>,
    pub delta: f64,
    pub seed: u64,
}

/// Gauss-Laguerre nodes and weights for `int_0^infty e^{-t} f(t) dt`.
///
/// Nodes are the eigenvalues of the symmetric Jacobi tridiagonal matrix
/// (diagonal `2k + 1`, off-diagonal `k`). Weights come from the orthonormal
/// Laguerre recurrence as `w_j = 1 / sum_k p_k(t_j)^2` rather than from the
/// eigenvector first components: the recurrence keeps relative accuracy at
/// the extreme nodes, where the eigenvector route only has absolute accuracy
/// and the weights underflow to noise.
pub fn gauss_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>), ProblemError> {
    if n < 1 || n > MAX_POINTS {
        return Err(ProblemError::SizeOutOfRange { n, min: 1, max: MAX_POINTS });
    }
    let mut jacobi = DenseMatrix::zeros(n, n);
    for k in 0..n {
        jacobi.set(k, k, (2 * k + 1) as f64);
        if k + 1 < n {
            let off = (k + 1) as f64;
            jacobi.set(k, k + 1, off);
            jacobi.set(k + 1, k, off);
        }
    }
    let eig = crate::linalg::sym_eig(&jacobi)?;
    // eigenvalues come out descending; nodes are reported ascending
    let mut nodes: Vec<f64> = eig.eigenvalues;
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let weights: Vec<f64> = nodes.iter().map(|&t| 1.0 / laguerre_sq_sum(n, t)).collect();
    Ok((nodes, weights))
}

/// `sum_{k=0}^{n-1} p_k(t)^2` for the orthonormal Laguerre polynomials
/// (`p_0 = 1`, `(k+1) p_{k+1} = (t - 2k - 1) p_k - k p_{k-1}`).
fn laguerre_sq_sum(n: usize, t: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = 1.0;
    let mut sum = 1.0;
    for k in 0..n - 1 {
        let next = ((t - (2 * k + 1) as f64) * cur - k as f64 * prev) / (k + 1) as f64;
        sum += next * next;
        prev = cur;
        cur = next;
    }
    sum
}

/// Laplace-kernel equation `int_0^infty e^{-st} x(t) dt = 2/(2s+1)` with the
/// exact solution `x(t) = e^{-t/2}`, collocated at `n` Gauss-Laguerre nodes.
///
/// The raw collocation matrix `w_j e^{t_j} e^{-t_i t_j}` is not symmetric, so
/// the system is rescaled by `s_j = sqrt(w_j e^{t_j})`: the returned matrix is
/// `A_ij = s_i e^{-t_i t_j} s_j`, acting on `x_scaled = s .* x(t)`, with
/// right-hand side `y_i = s_i h(t_i)`. The matrix is symmetric exactly, by
/// mirroring the computed upper triangle.
pub fn laplace_problem(n: usize) -> Result<DiscreteProblem, ProblemError> {
    if n < 1 || n > MAX_POINTS {
        return Err(ProblemError::SizeOutOfRange { n, min: 1, max: MAX_POINTS });
    }
    let (nodes, weights) = gauss_laguerre(n)?;
    let scaling: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&t, &w)| (w * t.exp()).sqrt())
        .collect();
    let mut a = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = scaling[i] * (-nodes[i] * nodes[j]).exp() * scaling[j];
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let x_exact: Vec<f64> = nodes
        .iter()
        .zip(&scaling)
        .map(|(&t, &s)| s * (-0.5 * t).exp())
        .collect();
    let y_exact: Vec<f64> = nodes
        .iter()
        .zip(&scaling)
        .map(|(&t, &s)| s * 2.0 / (2.0 * t + 1.0))
        .collect();
    let quadrature_defect = norm2(&sub_vec(&a.matvec(&x_exact)?, &y_exact));
    Ok(DiscreteProblem {
        kind: ProblemKind::Laplace,
        a,
        y_exact,
        x_exact,
        nodes,
        weights,
        scaling,
        quadrature_defect,
    })
}

/// Simpson-rule collocation of `int_0^1 (1+ts) e^{ts} x(s) ds = e^t` on the
/// uniform grid `t_i = i/n`, `i = 0..=n`. The exact solution is `x == 1`.
/// The matrix is `A_ij = w_j (1 + t_i t_j) e^{t_i t_j}` with composite Simpson
/// weights; no rescaling is applied.
pub fn simpson_problem(n: usize) -> Result<DiscreteProblem, ProblemError> {
    if n % 2 != 0 {
        return Err(ProblemError::OddSubintervals { n });
    }
    if n < 4 || n > MAX_POINTS {
        return Err(ProblemError::SizeOutOfRange { n, min: 4, max: MAX_POINTS });
    }
    let h = 1.0 / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let mut weights = vec![0.0; n + 1];
    weights[0] = h / 3.0;
    weights[n] = h / 3.0;
    for (i, w) in weights.iter_mut().enumerate().take(n).skip(1) {
        *w = if i % 2 == 1 { 4.0 * h / 3.0 } else { 2.0 * h / 3.0 };
    }
    let size = n + 1;
    let mut a = DenseMatrix::zeros(size, size);
    for i in 0..size {
        for j in 0..size {
            let tt = nodes[i] * nodes[j];
            a.set(i, j, weights[j] * (1.0 + tt) * tt.exp());
        }
    }
    let x_exact = vec![1.0; size];
    let y_exact: Vec<f64> = nodes.iter().map(|&t| t.exp()).collect();
    let quadrature_defect = norm2(&sub_vec(&a.matvec(&x_exact)?, &y_exact));
    Ok(DiscreteProblem {
        kind: ProblemKind::Simpson,
        a,
        y_exact,
        x_exact,
        nodes,
        weights,
        scaling: vec![1.0; size],
        quadrature_defect,
    })
}

/// Adds a seeded Gaussian perturbation scaled so `||y_delta - y||_2 = delta`
/// exactly. `delta = 0` returns the data unchanged.
pub fn add_noise(y: &[f64], delta: f64, seed: u64) -> NoisySample {
    assert!(delta >= 0.0, "noise level must be non-negative");
    if delta == 0.0 {
        return NoisySample { y_delta: y.to_vec(), delta, seed };
    }
    let mut rng = SplitMix64::new(seed);
    let eta = rng.normal_vec(y.len());
    let scale = delta / norm2(&eta);
    let y_delta = y.iter().zip(&eta).map(|(yi, ei)| yi + scale * ei).collect();
    NoisySample { y_delta, delta, seed }
}
