//! Lognormal size models, Weibull accumulation models and fit quality.

mod gauss_newton;
mod lognormal;
mod quality;
mod weibull;

use thiserror::Error;

pub use lognormal::{
    cdf_evaluation_grid, fit_lognormal_cdf, fit_lognormal_mle, fit_quality_cdf, lognormal_cdf,
    lognormal_pdf, LognormalParams,
};
pub use quality::{goodness_of_fit, FitQuality};
pub use weibull::{fit_weibull, weibull_cdf, WeibullFit, WeibullParams};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("argument out of domain: {0}")]
    DomainError(String),
    #[error("empty sample")]
    EmptySample,
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid input points: {0}")]
    InvalidPoints(String),
    #[error("actual values have zero variance; R² is undefined")]
    ZeroVariance,
    #[error("normal equations are singular")]
    Singular,
}
