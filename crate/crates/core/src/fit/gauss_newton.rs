//! Damped Gauss-Newton for two-parameter curve fits.

use super::FitError;

pub(crate) const STEP_TOLERANCE: f64 = 1e-10;
pub(crate) const MAX_ITERATIONS: usize = 100;
const MAX_HALVINGS: usize = 60;
const FLAT_STEP: f64 = 1e-7;

pub(crate) struct Solution {
    pub params: [f64; 2],
    pub iterations: usize,
    pub converged: bool,
}

/// A model evaluated at one abscissa: value and gradient w.r.t. the params.
pub(crate) trait Curve {
    fn eval(&self, x: f64, params: [f64; 2]) -> (f64, [f64; 2]);
    fn feasible(&self, params: [f64; 2]) -> bool;
}

fn sse<C: Curve>(curve: &C, xs: &[f64], ys: &[f64], params: [f64; 2]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| (curve.eval(x, params).0 - y).powi(2))
        .sum()
}

/// Minimizes Σ (model(x) − y)² from `start`.
///
/// Each iteration solves the 2×2 normal equations, then halves the step until
/// the residual sum decreases and the parameters stay feasible. Stops when
/// the accepted step is below [`STEP_TOLERANCE`] in every component or after
/// [`MAX_ITERATIONS`]; the latter, or a failed line search, is reported as
/// not converged with the best iterate.
pub(crate) fn minimize<C: Curve>(
    curve: &C,
    xs: &[f64],
    ys: &[f64],
    start: [f64; 2],
) -> Result<Solution, FitError> {
    let mut params = start;
    let mut cost = sse(curve, xs, ys, params);
    if !cost.is_finite() {
        return Err(FitError::InvalidParams(format!(
            "non-finite residuals at starting point {start:?}"
        )));
    }
    for iter in 1..=MAX_ITERATIONS {
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in xs.iter().zip(ys) {
            let (f, [j1, j2]) = curve.eval(x, params);
            let r = f - y;
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            g1 += j1 * r;
            g2 += j2 * r;
        }
        let det = a11 * a22 - a12 * a12;
        if !(det.is_finite() && det.abs() > f64::EPSILON * (a11 * a22).abs().max(f64::MIN_POSITIVE))
        {
            // Singular at the start is an error; later it means the model has
            // saturated, so the best iterate so far is returned unconverged.
            if iter == 1 {
                return Err(FitError::Singular);
            }
            return Ok(Solution {
                params,
                iterations: iter,
                converged: false,
            });
        }
        let step = [(-a22 * g1 + a12 * g2) / det, (a12 * g1 - a11 * g2) / det];

        if step[0].abs() < STEP_TOLERANCE && step[1].abs() < STEP_TOLERANCE {
            let candidate = [params[0] + step[0], params[1] + step[1]];
            if curve.feasible(candidate) && sse(curve, xs, ys, candidate) <= cost {
                params = candidate;
            }
            return Ok(Solution {
                params,
                iterations: iter,
                converged: true,
            });
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let candidate = [params[0] + t * step[0], params[1] + t * step[1]];
            if curve.feasible(candidate) {
                let c = sse(curve, xs, ys, candidate);
                if c.is_finite() && c < cost {
                    accepted = Some((candidate, c));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((candidate, c)) => {
                let moved = (candidate[0] - params[0]).abs().max((candidate[1] - params[1]).abs());
                params = candidate;
                cost = c;
                if moved < STEP_TOLERANCE {
                    return Ok(Solution {
                        params,
                        iterations: iter,
                        converged: true,
                    });
                }
            }
            None => {
                // No descent along the Gauss-Newton direction. A tiny step means
                // the cost is flat to rounding; anything else is a stuck fit.
                let scale = params[0].abs().max(params[1].abs()).max(1.0);
                let flat = step[0].abs().max(step[1].abs()) <= FLAT_STEP * scale;
                return Ok(Solution {
                    params,
                    iterations: iter,
                    converged: flat,
                });
            }
        }
    }
    Ok(Solution {
        params,
        iterations: MAX_ITERATIONS,
        converged: false,
    })
}
