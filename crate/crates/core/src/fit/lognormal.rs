use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::gauss_newton::{self, Curve};
use super::{goodness_of_fit, FitError, FitQuality};
use crate::normal::{std_normal_cdf, std_normal_pdf};
use crate::stats::empirical_cdf;

/// Lognormal size model: ln(X) ~ N(mu, sigma²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalParams {
    /// Scale: mean of ln(size).
    pub mu: f64,
    /// Shape: standard deviation of ln(size), always > 0.
    pub sigma: f64,
}

impl LognormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self, FitError> {
        if !mu.is_finite() {
            return Err(FitError::InvalidParams(format!("mu must be finite, got {mu}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(FitError::InvalidParams(format!("sigma must be > 0, got {sigma}")));
        }
        Ok(Self { mu, sigma })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let z = (x.ln() - self.mu) / self.sigma;
        (-0.5 * z * z).exp() / (self.sigma * x * (2.0 * PI).sqrt())
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        std_normal_cdf((x.ln() - self.mu) / self.sigma)
    }
}

fn check_positive(x: f64) -> Result<(), FitError> {
    if x > 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(FitError::DomainError(format!("x must be > 0, got {x}")))
    }
}

pub fn lognormal_pdf(x: f64, p: &LognormalParams) -> Result<f64, FitError> {
    check_positive(x)?;
    Ok(p.pdf(x))
}

pub fn lognormal_cdf(x: f64, p: &LognormalParams) -> Result<f64, FitError> {
    check_positive(x)?;
    Ok(p.cdf(x))
}

/// Maximum-likelihood fit: mean and population (÷n) standard deviation of
/// the log sizes.
pub fn fit_lognormal_mle(sizes: &[f64]) -> Result<LognormalParams, FitError> {
    match sizes.len() {
        0 => return Err(FitError::EmptySample),
        1 => {
            return Err(FitError::DegenerateSample(
                "a single observation has no spread".into(),
            ))
        }
        _ => {}
    }
    if let Some(bad) = sizes.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(FitError::DomainError(format!("sizes must be > 0, got {bad}")));
    }
    if sizes.iter().all(|&s| s == sizes[0]) {
        return Err(FitError::DegenerateSample(
            "all sizes are equal (sigma = 0)".into(),
        ));
    }
    let n = sizes.len() as f64;
    let logs: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let mu = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mu).powi(2)).sum::<f64>() / n;
    LognormalParams::new(mu, var.sqrt())
        .map_err(|_| FitError::DegenerateSample("log sizes have no spread".into()))
}

/// Powers of two bracketing the sample: 2^⌊log₂ min⌋ … 2^⌈log₂ max⌉.
pub fn cdf_evaluation_grid(sizes: &[u64]) -> Result<Vec<f64>, FitError> {
    let min = *sizes.iter().min().ok_or(FitError::EmptySample)?;
    let max = *sizes.iter().max().ok_or(FitError::EmptySample)?;
    if min == 0 {
        return Err(FitError::DomainError("sizes must be >= 1".into()));
    }
    let lo = min.ilog2();
    let hi = if max.is_power_of_two() {
        max.ilog2()
    } else {
        max.ilog2() + 1
    };
    Ok((lo..=hi).map(|k| 2f64.powi(k as i32)).collect())
}

/// Compares the empirical CDF with the model CDF on [`cdf_evaluation_grid`].
pub fn fit_quality_cdf(sizes: &[u64], p: &LognormalParams) -> Result<FitQuality, FitError> {
    let grid = cdf_evaluation_grid(sizes)?;
    let ecdf = empirical_cdf(sizes).map_err(|_| FitError::EmptySample)?;
    let actual: Vec<f64> = grid.iter().map(|&x| ecdf.eval(x)).collect();
    let predicted: Vec<f64> = grid.iter().map(|&x| p.cdf(x)).collect();
    goodness_of_fit(&actual, &predicted)
}

struct LogNormalCdfCurve;

impl Curve for LogNormalCdfCurve {
    fn eval(&self, x: f64, [mu, sigma]: [f64; 2]) -> (f64, [f64; 2]) {
        let z = (x.ln() - mu) / sigma;
        let phi = std_normal_pdf(z);
        (std_normal_cdf(z), [-phi / sigma, -phi * z / sigma])
    }

    fn feasible(&self, [mu, sigma]: [f64; 2]) -> bool {
        mu.is_finite() && sigma.is_finite() && sigma > 0.0
    }
}

/// Least-squares fit of the lognormal CDF to the empirical CDF on the
/// evaluation grid, started from the MLE. Kept for comparison with
/// [`fit_lognormal_mle`].
pub fn fit_lognormal_cdf(sizes: &[u64]) -> Result<(LognormalParams, FitQuality), FitError> {
    let as_f64: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    let start = fit_lognormal_mle(&as_f64)?;
    let grid = cdf_evaluation_grid(sizes)?;
    let ecdf = empirical_cdf(sizes).map_err(|_| FitError::EmptySample)?;
    let actual: Vec<f64> = grid.iter().map(|&x| ecdf.eval(x)).collect();
    if grid.len() < 3 {
        return Err(FitError::TooFewPoints {
            needed: 3,
            got: grid.len(),
        });
    }
    let sol = gauss_newton::minimize(&LogNormalCdfCurve, &grid, &actual, [start.mu, start.sigma])?;
    let params = LognormalParams::new(sol.params[0], sol.params[1])?;
    let quality = fit_quality_cdf(sizes, &params)?;
    Ok((params, quality))
}
