use serde::{Deserialize, Serialize};

use super::FitError;

/// Coefficient of determination and standard error of estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitQuality {
    pub r_squared: f64,
    /// √(Σ(y − y′)² / (n − 2))
    pub se: f64,
    pub n_points: usize,
}

/// R² = 1 − SS_res/SS_tot and Sₑ over paired actual/predicted series.
pub fn goodness_of_fit(actual: &[f64], predicted: &[f64]) -> Result<FitQuality, FitError> {
    if actual.len() != predicted.len() {
        return Err(FitError::InvalidPoints(format!(
            "{} actual values vs {} predictions",
            actual.len(),
            predicted.len()
        )));
    }
    let n = actual.len();
    if n < 3 {
        return Err(FitError::TooFewPoints { needed: 3, got: n });
    }
    let mean = actual.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = actual.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = actual
        .iter()
        .zip(predicted)
        .map(|(y, p)| (y - p).powi(2))
        .sum();
    if ss_tot == 0.0 {
        return Err(FitError::ZeroVariance);
    }
    Ok(FitQuality {
        r_squared: 1.0 - ss_res / ss_tot,
        se: (ss_res / (n - 2) as f64).sqrt(),
        n_points: n,
    })
}
