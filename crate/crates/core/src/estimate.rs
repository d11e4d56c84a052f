//! System-size and range-count estimates from a lognormal size model.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fit::LognormalParams;

/// An estimate is acceptable when its MRE does not exceed this.
pub const MRE_ACCEPTABLE: f64 = 0.25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("number of programs must be >= 1")]
    NoPrograms,
    #[error("bad size range [{x1}, {x2}]: need 0 < x1 < x2")]
    BadRange { x1: f64, x2: f64 },
    #[error("actual value must be > 0, got {0}")]
    DomainError(f64),
}

/// Lognormal parameters averaged over a corpus of 18 large open-source Java
/// systems, used as a general size model when a system has not been fitted.
#[derive(Debug, Clone, Copy)]
pub struct CorpusDefaults;

impl CorpusDefaults {
    pub const MU: f64 = 3.8277;
    pub const SIGMA: f64 = 1.3472;

    pub fn params() -> LognormalParams {
        LognormalParams {
            mu: Self::MU,
            sigma: Self::SIGMA,
        }
    }

    /// Expected program size under the corpus model, unrounded (≈113.8833).
    pub fn expected_size() -> f64 {
        expected_program_size(&Self::params())
    }

    /// The expected size rounded to two decimals (113.88): the per-program
    /// constant of the published "size = N × 113.88" rule.
    pub fn rule_constant() -> f64 {
        (Self::expected_size() * 100.0).round() / 100.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub estimate: f64,
    /// `estimate` rounded half-up to a whole number.
    pub rounded: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub actual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mre: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub acceptable: Option<bool>,
}

impl EstimationResult {
    pub fn new(estimate: f64) -> Self {
        Self {
            estimate,
            rounded: round_half_up(estimate),
            actual: None,
            mre: None,
            acceptable: None,
        }
    }

    /// Attaches the true value and evaluates the unrounded estimate against
    /// it. Use for continuous quantities such as total LOC.
    pub fn with_actual(self, actual: f64) -> Result<Self, EstimateError> {
        let e = mre(actual, self.estimate)?;
        self.attach(actual, e)
    }

    /// Like [`with_actual`](Self::with_actual) but evaluates the rounded
    /// estimate, for program counts where only whole numbers are meaningful.
    pub fn with_actual_count(self, actual: f64) -> Result<Self, EstimateError> {
        let e = mre(actual, self.rounded as f64)?;
        self.attach(actual, e)
    }

    fn attach(mut self, actual: f64, e: f64) -> Result<Self, EstimateError> {
        self.actual = Some(actual);
        self.mre = Some(e);
        self.acceptable = Some(e <= MRE_ACCEPTABLE);
        Ok(self)
    }
}

/// Half-up rounding to a non-negative whole number (86.5 → 87).
pub fn round_half_up(x: f64) -> u64 {
    if x.is_nan() || x <= 0.0 {
        0
    } else {
        (x + 0.5).floor() as u64
    }
}

/// Mean of the lognormal: exp(μ + σ²/2).
pub fn expected_program_size(p: &LognormalParams) -> f64 {
    (p.mu + p.sigma * p.sigma / 2.0).exp()
}

/// `n_programs × expected_program_size(p)`.
pub fn estimate_total_size(
    n_programs: u64,
    p: &LognormalParams,
) -> Result<EstimationResult, EstimateError> {
    if n_programs == 0 {
        return Err(EstimateError::NoPrograms);
    }
    Ok(EstimationResult::new(n_programs as f64 * expected_program_size(p)))
}

/// `n_programs × 113.88`, the two-decimal corpus rule.
pub fn estimate_total_size_corpus_rule(
    n_programs: u64,
) -> Result<EstimationResult, EstimateError> {
    if n_programs == 0 {
        return Err(EstimateError::NoPrograms);
    }
    Ok(EstimationResult::new(
        n_programs as f64 * CorpusDefaults::rule_constant(),
    ))
}

/// Unrounded `n × (F(x2) − F(x1))`.
pub fn expected_count_in_range(
    n_programs: u64,
    x1: f64,
    x2: f64,
    p: &LognormalParams,
) -> Result<f64, EstimateError> {
    if !(x1 > 0.0 && x2 > x1 && x2.is_finite()) {
        return Err(EstimateError::BadRange { x1, x2 });
    }
    Ok(n_programs as f64 * (p.cdf(x2) - p.cdf(x1)))
}

/// Number of programs expected in `[x1, x2]`, rounded half-up.
pub fn estimate_count_in_range(
    n_programs: u64,
    x1: f64,
    x2: f64,
    p: &LognormalParams,
) -> Result<EstimationResult, EstimateError> {
    expected_count_in_range(n_programs, x1, x2, p).map(EstimationResult::new)
}

/// Magnitude of relative error |actual − estimate| / actual.
pub fn mre(actual: f64, estimate: f64) -> Result<f64, EstimateError> {
    if !(actual > 0.0 && actual.is_finite()) {
        return Err(EstimateError::DomainError(actual));
    }
    Ok((actual - estimate).abs() / actual)
}
