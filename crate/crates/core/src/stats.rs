//! Descriptive statistics and empirical distributions over program sizes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub min: u64,
    /// Middle value; mean of the two middle values for even `n`.
    pub median: f64,
    pub max: u64,
    /// Most frequent value, smallest on ties.
    pub mode: u64,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator; 0 for a singleton).
    pub std_dev: f64,
}

pub fn describe(sizes: &[u64]) -> Result<DescriptiveStats, StatsError> {
    if sizes.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    let median = if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] as f64 + sorted[n / 2] as f64) / 2.0
    };

    let mut mode = sorted[0];
    let mut best_run = 0;
    let mut i = 0;
    while i < n {
        let j = sorted[i..].partition_point(|&v| v == sorted[i]) + i;
        if j - i > best_run {
            best_run = j - i;
            mode = sorted[i];
        }
        i = j;
    }

    let mean = sorted.iter().map(|&v| v as f64).sum::<f64>() / n as f64;
    let std_dev = if n > 1 {
        let ss: f64 = sorted.iter().map(|&v| (v as f64 - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };

    Ok(DescriptiveStats {
        n,
        min: sorted[0],
        median,
        max: sorted[n - 1],
        mode,
        mean,
        std_dev,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub size: u64,
    pub fraction: f64,
}

/// Step-function empirical CDF, one point per distinct size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    points: Vec<CdfPoint>,
    n: usize,
}

impl EmpiricalCdf {
    pub fn points(&self) -> &[CdfPoint] {
        &self.points
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    /// F(x) = fraction of the sample ≤ x.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.points.partition_point(|p| (p.size as f64) <= x);
        if k == 0 {
            0.0
        } else {
            self.points[k - 1].fraction
        }
    }
}

pub fn empirical_cdf(sizes: &[u64]) -> Result<EmpiricalCdf, StatsError> {
    if sizes.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &s in sizes {
        *counts.entry(s).or_default() += 1;
    }
    let n = sizes.len();
    let mut cumulative = 0;
    let points = counts
        .into_iter()
        .map(|(size, c)| {
            cumulative += c;
            CdfPoint {
                size,
                fraction: if cumulative == n {
                    1.0
                } else {
                    cumulative as f64 / n as f64
                },
            }
        })
        .collect();
    Ok(EmpiricalCdf { points, n })
}

/// Programs ranked from largest to smallest: `(rank, size)` with rank 1 first.
pub fn rank_size_curve(sizes: &[u64]) -> Result<Vec<(usize, u64)>, StatsError> {
    if sizes.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    Ok(sorted.into_iter().enumerate().map(|(i, s)| (i + 1, s)).collect())
}

/// Fraction of programs strictly smaller than `threshold`.
pub fn share_below(sizes: &[u64], threshold: u64) -> Result<f64, StatsError> {
    if sizes.is_empty() {
        return Err(StatsError::EmptySample);
    }
    Ok(sizes.iter().filter(|&&s| s < threshold).count() as f64 / sizes.len() as f64)
}

/// Fraction of programs strictly larger than `threshold`.
pub fn share_above(sizes: &[u64], threshold: u64) -> Result<f64, StatsError> {
    if sizes.is_empty() {
        return Err(StatsError::EmptySample);
    }
    Ok(sizes.iter().filter(|&&s| s > threshold).count() as f64 / sizes.len() as f64)
}
