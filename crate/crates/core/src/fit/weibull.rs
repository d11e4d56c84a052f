use serde::{Deserialize, Serialize};

use super::gauss_newton::{self, Curve};
use super::{goodness_of_fit, FitError, FitQuality};

/// Weibull accumulation curve P(x) = 1 − exp(−(x/γ)^β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullParams {
    /// Scale γ > 0.
    pub gamma: f64,
    /// Shape β > 0.
    pub beta: f64,
}

impl WeibullParams {
    pub fn new(gamma: f64, beta: f64) -> Result<Self, FitError> {
        if !(gamma.is_finite() && gamma > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(FitError::InvalidParams(format!(
                "gamma and beta must be > 0, got gamma={gamma}, beta={beta}"
            )));
        }
        Ok(Self { gamma, beta })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        -(-(x / self.gamma).powf(self.beta)).exp_m1()
    }
}

pub fn weibull_cdf(x: f64, p: &WeibullParams) -> Result<f64, FitError> {
    if x.is_nan() || x < 0.0 {
        return Err(FitError::DomainError(format!("x must be >= 0, got {x}")));
    }
    Ok(p.cdf(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullFit {
    pub params: WeibullParams,
    pub quality: FitQuality,
    pub iterations: usize,
    /// False when the iteration cap was hit or the line search stalled;
    /// `params` then holds the best iterate found.
    pub converged: bool,
}

struct WeibullCurve;

impl Curve for WeibullCurve {
    fn eval(&self, x: f64, [gamma, beta]: [f64; 2]) -> (f64, [f64; 2]) {
        if x <= 0.0 {
            return (0.0, [0.0, 0.0]);
        }
        let u = (x / gamma).powf(beta);
        let survive = (-u).exp();
        let d_gamma = -survive * u * beta / gamma;
        let d_beta = survive * u * (x / gamma).ln();
        (-(-u).exp_m1(), [d_gamma, d_beta])
    }

    fn feasible(&self, [gamma, beta]: [f64; 2]) -> bool {
        gamma.is_finite() && beta.is_finite() && gamma > 0.0 && beta > 0.0
    }
}

/// Starting point from ordinary least squares on the linearized model
/// ln(−ln(1 − y)) = β·ln x − β·ln γ, using points with 0 < y < 1.
fn linearized_start(xs: &[f64], ys: &[f64]) -> Option<[f64; 2]> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, &y)| y > 0.0 && y < 1.0)
        .map(|(&x, &y)| (x.ln(), (-(-y).ln_1p()).ln()))
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let beta = sxy / sxx;
    let intercept = my - beta * mx;
    let gamma = (-intercept / beta).exp();
    (beta > 0.0 && gamma.is_finite() && gamma > 0.0).then_some([gamma, beta])
}

fn fallback_start(xs: &[f64], ys: &[f64]) -> [f64; 2] {
    // γ is where the curve reaches 1 − e⁻¹.
    let target = 1.0 - (-1.0f64).exp();
    let gamma = xs
        .iter()
        .zip(ys)
        .find(|(_, &y)| y >= target)
        .map(|(&x, _)| x)
        .unwrap_or(xs[xs.len() - 1]);
    [gamma, 1.0]
}

fn validate_points(points: &[(f64, f64)]) -> Result<(), FitError> {
    if points.len() < 4 {
        return Err(FitError::TooFewPoints {
            needed: 4,
            got: points.len(),
        });
    }
    for (i, &(x, y)) in points.iter().enumerate() {
        if !(x.is_finite() && x > 0.0) {
            return Err(FitError::InvalidPoints(format!("point {i}: x must be > 0, got {x}")));
        }
        if !(0.0..=1.0).contains(&y) {
            return Err(FitError::InvalidPoints(format!(
                "point {i}: y must lie in [0, 1], got {y}"
            )));
        }
        if i > 0 {
            let (px, py) = points[i - 1];
            if x <= px {
                return Err(FitError::InvalidPoints(format!(
                    "x must be strictly increasing (point {i})"
                )));
            }
            if y < py {
                return Err(FitError::InvalidPoints(format!(
                    "y must be non-decreasing (point {i})"
                )));
            }
        }
    }
    Ok(())
}

/// Least-squares fit of the Weibull CDF to `(x, y)` points.
///
/// Starts from the linearized regression and refines with damped
/// Gauss-Newton until the parameter change drops below 1e−10 or 100
/// iterations pass. Quality is computed over all input points, including
/// those with y = 1 that the linearization skips.
pub fn fit_weibull(points: &[(f64, f64)]) -> Result<WeibullFit, FitError> {
    validate_points(points)?;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    if ys.iter().all(|&y| y == ys[0]) {
        return Err(FitError::DegenerateSample("all y values are equal".into()));
    }
    let start = linearized_start(&xs, &ys).unwrap_or_else(|| fallback_start(&xs, &ys));
    let sol = gauss_newton::minimize(&WeibullCurve, &xs, &ys, start)?;
    let params = WeibullParams::new(sol.params[0], sol.params[1])?;
    let predicted: Vec<f64> = xs.iter().map(|&x| params.cdf(x)).collect();
    let quality = goodness_of_fit(&ys, &predicted)?;
    Ok(WeibullFit {
        params,
        quality,
        iterations: sol.iterations,
        converged: sol.converged,
    })
}
