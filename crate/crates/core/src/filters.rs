//! Spectral filter functions for regularizing discrete ill-posed problems.
//!
//! A filter `q(alpha, mu)` damps the `1/mu_j` amplification in the singular
//! value expansion of the solution. The variants here:
//!
//! ```text
//! tikhonov                       mu^2 / (alpha + mu^2)
//! landweber                      1 - (1 - a mu^2)^m
//! iterated tikhonov              1 - (alpha / (alpha + mu^2))^m
//! weighted-II                    mu^2 / (mu^2 + alpha (1 - (mu/mu1)^2)^l)
//! fractional tikhonov            (mu^2 / (alpha + mu^2))^r
//! fractional weighted            (mu^2 / (mu^2 + alpha (1 - (mu/mu1)^2)^l))^r
//! iterated fractional weighted   1 - (1 - q_fw)^m
//! ```
//!
//! The module also verifies, numerically on grids, the regularizing-filter
//! conditions (boundedness of `q/mu`, boundedness of `q`, pointwise limit
//! `q -> 1`) and the order-optimality conditions (decay of `sup q/mu` and of
//! the qualification supremum `sup (1-q) mu^sigma` in `alpha`).

use std::fmt;

/// Error type for filter evaluation and condition checks.
#[derive(Debug, Clone, PartialEq)]
pub enum FilterError {
    /// A parameter violates its admissible range.
    InvalidParameter { name: &'static str, value: f64, requirement: &'static str },
    /// `mu` outside `(0, mu1]`.
    MuOutOfRange { mu: f64, mu1: f64 },
    /// Landweber step size too large for the spectrum: needs `a * mu1^2 < 2`.
    StepSizeTooLarge { a: f64, mu1: f64 },
    /// Condition checks need non-empty grids.
    EmptyGrid,
}

impl fmt::Display for FilterError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterError::InvalidParameter { name, value, requirement } => {
                write!(f, "invalid parameter {name} = {value}: {requirement}")
            }
            FilterError::MuOutOfRange { mu, mu1 } => {
                write!(f, "mu = {mu} outside (0, {mu1}]")
            }
            FilterError::StepSizeTooLarge { a, mu1 } => {
                write!(f, "landweber step a = {a} violates a * mu1^2 < 2 (mu1 = {mu1})")
            }
            FilterError::EmptyGrid => write!(f, "grid must be non-empty"),
        }
    }
}

impl std::error::Error for FilterError {}

/// Tagged description of a regularization method family and its parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum FilterSpec {
    Tikhonov { alpha: f64 },
    Landweber { a: f64, m: u32 },
    IteratedTikhonov { alpha: f64, m: u32 },
    WeightedII { alpha: f64, l: u32 },
    FractionalTikhonov { alpha: f64, r: f64 },
    FractionalWeighted { alpha: f64, l: u32, r: f64 },
    IteratedFractionalWeighted { alpha: f64, l: u32, r: f64, m: u32 },
}

/// Weight factor `(1 - (mu/mu1)^2)`, snapped to exactly zero near `mu = mu1`
/// to avoid catastrophic cancellation; the filter value is then exactly 1.
fn spectral_weight(mu: f64, mu1: f64) -> f64 {
    let ratio = mu / mu1;
    let w = 1.0 - ratio * ratio;
    if w.abs() < 1e-15 {
        0.0
    } else {
        w
    }
}

impl FilterSpec {
    /// Checks the static parameter ranges (everything except the
    /// spectrum-dependent Landweber step bound).
    pub fn validate(&self) -> Result<(), FilterError> {
        let check_alpha = |alpha: f64| {
            if alpha > 0.0 && alpha.is_finite() {
                Ok(())
            } else {
                Err(FilterError::InvalidParameter {
                    name: "alpha",
                    value: alpha,
                    requirement: "must be positive and finite",
                })
            }
        };
        let check_r = |r: f64| {
            if r >= 0.5 && r.is_finite() {
                Ok(())
            } else {
                Err(FilterError::InvalidParameter {
                    name: "r",
                    value: r,
                    requirement: "must satisfy r >= 1/2",
                })
            }
        };
        let check_m = |m: u32| {
            if m >= 1 {
                Ok(())
            } else {
                Err(FilterError::InvalidParameter {
                    name: "m",
                    value: m as f64,
                    requirement: "must be at least 1",
                })
            }
        };
        match *self {
            FilterSpec::Tikhonov { alpha } => check_alpha(alpha),
            FilterSpec::Landweber { a, m } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(FilterError::InvalidParameter {
                        name: "a",
                        value: a,
                        requirement: "must be positive and finite",
                    });
                }
                check_m(m)
            }
            FilterSpec::IteratedTikhonov { alpha, m } => {
                check_alpha(alpha)?;
                check_m(m)
            }
            FilterSpec::WeightedII { alpha, .. } => check_alpha(alpha),
            FilterSpec::FractionalTikhonov { alpha, r } => {
                check_alpha(alpha)?;
                check_r(r)
            }
            FilterSpec::FractionalWeighted { alpha, r, .. } => {
                check_alpha(alpha)?;
                check_r(r)
            }
            FilterSpec::IteratedFractionalWeighted { alpha, r, m, .. } => {
                check_alpha(alpha)?;
                check_r(r)?;
                check_m(m)
            }
        }
    }

    /// Same family with the regularization parameter replaced; Landweber has
    /// no `alpha` and is returned unchanged.
    pub fn with_alpha(&self, alpha: f64) -> FilterSpec {
        let mut spec = self.clone();
        match &mut spec {
            FilterSpec::Tikhonov { alpha: a }
            | FilterSpec::IteratedTikhonov { alpha: a, .. }
            | FilterSpec::WeightedII { alpha: a, .. }
            | FilterSpec::FractionalTikhonov { alpha: a, .. }
            | FilterSpec::FractionalWeighted { alpha: a, .. }
            | FilterSpec::IteratedFractionalWeighted { alpha: a, .. } => *a = alpha,
            FilterSpec::Landweber { .. } => {}
        }
        spec
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            FilterSpec::Tikhonov { alpha }
            | FilterSpec::IteratedTikhonov { alpha, .. }
            | FilterSpec::WeightedII { alpha, .. }
            | FilterSpec::FractionalTikhonov { alpha, .. }
            | FilterSpec::FractionalWeighted { alpha, .. }
            | FilterSpec::IteratedFractionalWeighted { alpha, .. } => Some(alpha),
            FilterSpec::Landweber { .. } => None,
        }
    }

    /// Short method tag used in output files.
    pub fn name(&self) -> &'static str {
        match self {
            FilterSpec::Tikhonov { .. } => "tikhonov",
            FilterSpec::Landweber { .. } => "landweber",
            FilterSpec::IteratedTikhonov { .. } => "iterated-tikhonov",
            FilterSpec::WeightedII { .. } => "weighted-ii",
            FilterSpec::FractionalTikhonov { .. } => "fractional-tikhonov",
            FilterSpec::FractionalWeighted { .. } => "fractional-weighted",
            FilterSpec::IteratedFractionalWeighted { .. } => "iterated-fractional-weighted",
        }
    }

    /// Evaluates the filter at `mu` for a spectrum with top singular value
    /// `mu1`.
    pub fn value(&self, mu: f64, mu1: f64) -> Result<f64, FilterError> {
        self.validate()?;
        if !(mu1 > 0.0) || !(mu > 0.0) || mu > mu1 {
            return Err(FilterError::MuOutOfRange { mu, mu1 });
        }
        let mu2 = mu * mu;
        Ok(match *self {
            FilterSpec::Tikhonov { alpha } => mu2 / (alpha + mu2),
            FilterSpec::Landweber { a, m } => {
                if a * mu1 * mu1 >= 2.0 {
                    return Err(FilterError::StepSizeTooLarge { a, mu1 });
                }
                1.0 - (1.0 - a * mu2).powi(m as i32)
            }
            FilterSpec::IteratedTikhonov { alpha, m } => {
                1.0 - (alpha / (alpha + mu2)).powi(m as i32)
            }
            FilterSpec::WeightedII { alpha, l } => {
                let w = spectral_weight(mu, mu1);
                mu2 / (mu2 + alpha * w.powi(l as i32))
            }
            FilterSpec::FractionalTikhonov { alpha, r } => {
                let base = mu2 / (alpha + mu2);
                fractional_power(base, r)
            }
            FilterSpec::FractionalWeighted { alpha, l, r } => {
                let w = spectral_weight(mu, mu1);
                let base = mu2 / (mu2 + alpha * w.powi(l as i32));
                fractional_power(base, r)
            }
            FilterSpec::IteratedFractionalWeighted { alpha, l, r, m } => {
                let w = spectral_weight(mu, mu1);
                let base = mu2 / (mu2 + alpha * w.powi(l as i32));
                1.0 - (1.0 - fractional_power(base, r)).powi(m as i32)
            }
        })
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FilterSpec::Tikhonov { alpha } => write!(f, "tikhonov(alpha={alpha})"),
            FilterSpec::Landweber { a, m } => write!(f, "landweber(a={a},m={m})"),
            FilterSpec::IteratedTikhonov { alpha, m } => {
                write!(f, "iterated-tikhonov(alpha={alpha},m={m})")
            }
            FilterSpec::WeightedII { alpha, l } => {
                write!(f, "weighted-ii(alpha={alpha},l={l})")
            }
            FilterSpec::FractionalTikhonov { alpha, r } => {
                write!(f, "fractional-tikhonov(alpha={alpha},r={r})")
            }
            FilterSpec::FractionalWeighted { alpha, l, r } => {
                write!(f, "fractional-weighted(alpha={alpha},l={l},r={r})")
            }
            FilterSpec::IteratedFractionalWeighted { alpha, l, r, m } => {
                write!(f, "iterated-fractional-weighted(alpha={alpha},l={l},r={r},m={m})")
            }
        }
    }
}

/// `base^r` with the exact value preserved at `r = 1`.
fn fractional_power(base: f64, r: f64) -> f64 {
    if r == 1.0 {
        base
    } else {
        base.powf(r)
    }
}

/// Free-function form of [`FilterSpec::value`].
pub fn filter_value(spec: &FilterSpec, mu: f64, mu1: f64) -> Result<f64, FilterError> {
    spec.value(mu, mu1)
}

/// Numeric summary of the regularizing-filter and order-optimality conditions
/// on a `(mu, alpha)` grid.
#[derive(Debug, Clone)]
pub struct FilterConditionReport {
    /// Largest `|q/mu|` over both grids.
    pub c_alpha: f64,
    /// Largest `|q|` over both grids.
    pub q_bound: f64,
    /// True when `q > 0.95` at the smallest grid alpha for every grid `mu`
    /// above `1e-4 * mu1`. The floor keeps transient grid points of order
    /// `sqrt(alpha)` from masking the pointwise limit.
    pub limit_check: bool,
    /// Fitted exponent `gamma` in `c(alpha) ~ alpha^(-gamma)`.
    pub gamma_fit: f64,
    /// Largest `(1-q) mu^sigma` over both grids.
    pub qualification_sup: f64,
    /// Per-alpha values of `sup_mu |q/mu|`, grid order.
    pub c_alpha_curve: Vec<f64>,
    /// Per-alpha values of `sup_mu (1-q) mu^sigma`, grid order.
    pub qualification_curve: Vec<f64>,
}

const LIMIT_CHECK_TOL: f64 = 0.05;

fn condition_report(
    spec: &FilterSpec,
    sigma: f64,
    mu_grid: &[f64],
    alpha_grid: &[f64],
) -> Result<FilterConditionReport, FilterError> {
    if mu_grid.is_empty() || alpha_grid.is_empty() {
        return Err(FilterError::EmptyGrid);
    }
    let mu1 = mu_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut c_alpha_curve = Vec::with_capacity(alpha_grid.len());
    let mut qualification_curve = Vec::with_capacity(alpha_grid.len());
    let mut q_bound = 0.0_f64;
    for &alpha in alpha_grid {
        let at_alpha = spec.with_alpha(alpha);
        let mut c = 0.0_f64;
        let mut qual = 0.0_f64;
        for &mu in mu_grid {
            let q = at_alpha.value(mu, mu1)?;
            c = c.max((q / mu).abs());
            qual = qual.max(((1.0 - q) * mu.powf(sigma)).abs());
            q_bound = q_bound.max(q.abs());
        }
        c_alpha_curve.push(c);
        qualification_curve.push(qual);
    }

    let alpha_min = alpha_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let at_alpha_min = spec.with_alpha(alpha_min);
    let mut limit_check = true;
    for &mu in mu_grid.iter().filter(|&&mu| mu >= 1e-4 * mu1) {
        if at_alpha_min.value(mu, mu1)? <= 1.0 - LIMIT_CHECK_TOL {
            limit_check = false;
            break;
        }
    }

    let neg_log_alpha: Vec<f64> = alpha_grid.iter().map(|a| -a.ln()).collect();
    let log_c: Vec<f64> = c_alpha_curve.iter().map(|c| c.ln()).collect();
    let gamma_fit = fit_slope(&neg_log_alpha, &log_c);

    Ok(FilterConditionReport {
        c_alpha: c_alpha_curve.iter().cloned().fold(0.0, f64::max),
        q_bound,
        limit_check,
        gamma_fit,
        qualification_sup: qualification_curve.iter().cloned().fold(0.0, f64::max),
        c_alpha_curve,
        qualification_curve,
    })
}

/// Verifies the regularizing-filter conditions on grids: finiteness of
/// `sup |q/mu|` per alpha, boundedness of `q`, and the pointwise limit
/// `q -> 1` as alpha tends to zero.
pub fn check_filter_conditions(
    spec: &FilterSpec,
    mu_grid: &[f64],
    alpha_grid: &[f64],
) -> Result<FilterConditionReport, FilterError> {
    condition_report(spec, 0.0, mu_grid, alpha_grid)
}

/// Verifies the order-optimality conditions for smoothness exponent `sigma`:
/// the qualification supremum `sup (1-q) mu^sigma` per alpha and the fitted
/// decay exponent of `c(alpha)`.
pub fn check_order_conditions(
    spec: &FilterSpec,
    sigma: f64,
    mu_grid: &[f64],
    alpha_grid: &[f64],
) -> Result<FilterConditionReport, FilterError> {
    if !(sigma > 0.0) {
        return Err(FilterError::InvalidParameter {
            name: "sigma",
            value: sigma,
            requirement: "must be positive",
        });
    }
    condition_report(spec, sigma, mu_grid, alpha_grid)
}

/// Log-spaced `mu` grid on `(mu1 * 1e-8, mu1]` with the `sqrt(alpha)` points
/// inserted, since that is where `q/mu` peaks for the Tikhonov family.
pub fn make_mu_grid(mu1: f64, points: usize, alpha_grid: &[f64]) -> Vec<f64> {
    assert!(mu1 > 0.0 && points >= 2);
    let mut lo = mu1 * 1e-8;
    for &alpha in alpha_grid {
        let s = alpha.sqrt();
        if s > 0.0 {
            lo = lo.min(s / 4.0);
        }
    }
    let (ln_lo, ln_hi) = (lo.ln(), mu1.ln());
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (ln_lo + (ln_hi - ln_lo) * i as f64 / (points - 1) as f64).exp())
        .collect();
    for &alpha in alpha_grid {
        let s = alpha.sqrt();
        if s > 0.0 && s <= mu1 {
            grid.push(s);
        }
    }
    grid.push(mu1);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    // keep mu1 exact at the top even after float round-trips
    if let Some(last) = grid.last_mut() {
        *last = mu1;
    }
    grid
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Least-squares slope in log-log coordinates.
pub fn fit_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_slope(&lx, &ly)
}

/// Checks the two-sided comparison between the fractional-weighted residual
/// factor and the weighted-II one:
/// `min(1,r) (1-q_w) <= 1 - q_fw <= max(1,r) (1-q_w)`, with `1e-12` slack.
pub fn sandwich_check(l: u32, r: f64, alpha: f64, mu: f64, mu1: f64) -> bool {
    let weighted = FilterSpec::WeightedII { alpha, l };
    let fractional = FilterSpec::FractionalWeighted { alpha, l, r };
    let (q1, qr) = match (weighted.value(mu, mu1), fractional.value(mu, mu1)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return false,
    };
    let residual_w = 1.0 - q1;
    let residual_f = 1.0 - qr;
    let lo = r.min(1.0) * residual_w;
    let hi = r.max(1.0) * residual_w;
    const SLACK: f64 = 1e-12;
    lo <= residual_f + SLACK && residual_f <= hi + SLACK
}

/// The ratio `(1 - q^r) / (1 - q)` as a function of `x = mu^2 / a` where
/// `a = alpha (1 - (mu/mu1)^2)^l`: `((x+1)^r - x^r) / (x+1)^(r-1)`.
/// Monotone between `f(0) = 1` and `f(x) -> r` as `x -> infinity`.
pub fn fractional_residual_ratio(x: f64, r: f64) -> f64 {
    ((x + 1.0).powf(r) - x.powf(r)) / (x + 1.0).powf(r - 1.0)
}
