//! Deterministic generators shared by unit, property and acceptance tests.

use crate::linalg::DenseMatrix;
use crate::rng::SplitMix64;

/// Random symmetric positive-semidefinite matrix with spectrum log-uniform in
/// `[lambda_min, lambda_max]`, built as `V diag(lambda) V^T` from a random
/// orthogonal basis.
pub fn random_symmetric_psd_with_spectrum(
    n: usize,
    lambda_min: f64,
    lambda_max: f64,
    rng: &mut SplitMix64,
) -> DenseMatrix {
    assert!(lambda_min > 0.0 && lambda_max >= lambda_min);
    let basis = random_orthogonal(n, rng);
    let (ln_lo, ln_hi) = (lambda_min.ln(), lambda_max.ln());
    let spectrum: Vec<f64> = (0..n)
        .map(|_| (ln_lo + (ln_hi - ln_lo) * rng.next_unit()).exp())
        .collect();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = 0.0;
            for (k, &lam) in spectrum.iter().enumerate() {
                acc += lam * basis.get(i, k) * basis.get(j, k);
            }
            out.set(i, j, acc);
            out.set(j, i, acc);
        }
    }
    out
}

/// Moderately conditioned random symmetric PSD matrix (spectrum in `[1e-2, 2]`).
pub fn random_symmetric_psd(n: usize, rng: &mut SplitMix64) -> DenseMatrix {
    random_symmetric_psd_with_spectrum(n, 1e-2, 2.0, rng)
}

/// Random orthogonal matrix via Gram-Schmidt on Gaussian columns.
pub fn random_orthogonal(n: usize, rng: &mut SplitMix64) -> DenseMatrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut candidate = rng.normal_vec(n);
        for existing in &cols {
            let overlap: f64 = candidate.iter().zip(existing).map(|(a, b)| a * b).sum();
            for (c, e) in candidate.iter_mut().zip(existing) {
                *c -= overlap * e;
            }
        }
        let norm = candidate.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        for c in candidate.iter_mut() {
            *c /= norm;
        }
        cols.push(candidate);
    }
    let mut out = DenseMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            out.set(i, j, col[i]);
        }
    }
    out
}

/// Standard normal vector.
pub fn random_vector(n: usize, rng: &mut SplitMix64) -> Vec<f64> {
    rng.normal_vec(n)
}
