//! Whole-dataset analysis report.
//!
//! JSON is the canonical form: fields appear in declaration order and floats
//! use the shortest representation that reads back to the same `f64`. The
//! CSV form flattens the table-like sections into `section,key,value` rows.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::defects::{
    alberg_curve, concentration_table, fit_defect_weibull, ConcentrationRow, DefectError,
    DEFAULT_TOP_PERCENTS,
};
use crate::estimate::{
    estimate_count_in_range, estimate_total_size, estimate_total_size_corpus_rule,
    CorpusDefaults, EstimateError, EstimationResult,
};
use crate::fit::{fit_lognormal_mle, fit_quality_cdf, FitError, FitQuality, LognormalParams, WeibullFit};
use crate::ingest::{Dataset, DefectKind};
use crate::stats::{describe, share_above, share_below, DescriptiveStats, StatsError};

pub const SCHEMA_VERSION: u32 = 1;

/// Size ranges evaluated by default, inclusive on integers.
pub const DEFAULT_RANGES: [(u64, u64); 4] = [(3, 64), (65, 256), (257, 1024), (1025, 2048)];
/// Thresholds for the small/large program shares.
pub const SHARE_THRESHOLDS: [u64; 4] = [32, 64, 512, 1024];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Defect(#[from] DefectError),
    #[error("serialization failed: {0}")]
    Serialize(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetIdentity {
    pub name: String,
    pub version_label: String,
    pub programs: usize,
    pub total_loc: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeShare {
    pub threshold: u64,
    /// Share of programs with LOC < threshold.
    pub below: f64,
    /// Share of programs with LOC > threshold.
    pub above: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LognormalSection {
    pub params: LognormalParams,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quality: Option<FitQuality>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeEstimate {
    pub x1: u64,
    pub x2: u64,
    pub result: EstimationResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationSection {
    pub corpus_params: LognormalParams,
    pub rule_constant: f64,
    /// `programs × rule_constant` against the dataset's total LOC.
    pub total_size: EstimationResult,
    /// `programs × exp(mu + sigma²/2)` with the dataset's own fit.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fitted_total_size: Option<EstimationResult>,
    pub ranges: Vec<RangeEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectSection {
    pub kind: DefectKind,
    pub total_defects: u64,
    pub concentration: Vec<ConcentrationRow>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weibull: Option<WeibullFit>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub weibull_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub generated_unix: Option<u64>,
    pub dataset: DatasetIdentity,
    pub descriptive: DescriptiveStats,
    pub size_shares: Vec<SizeShare>,
    pub lognormal: LognormalSection,
    pub estimation: EstimationSection,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub defects: Vec<DefectSection>,
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub top_percents: Vec<f64>,
    pub ranges: Vec<(u64, u64)>,
    /// Seconds since the Unix epoch; `None` omits the field.
    pub generated_unix: Option<u64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            top_percents: DEFAULT_TOP_PERCENTS.to_vec(),
            ranges: DEFAULT_RANGES.to_vec(),
            generated_unix: None,
        }
    }
}

fn with_optional_count(r: EstimationResult, actual: f64) -> Result<EstimationResult, EstimateError> {
    if actual > 0.0 {
        r.with_actual_count(actual)
    } else {
        Ok(r)
    }
}

pub fn build_report(dataset: &Dataset, options: &ReportOptions) -> Result<AnalysisReport, ReportError> {
    let sizes = dataset.sizes();
    let descriptive = describe(&sizes)?;
    let size_shares = SHARE_THRESHOLDS
        .iter()
        .map(|&t| {
            Ok(SizeShare {
                threshold: t,
                below: share_below(&sizes, t)?,
                above: share_above(&sizes, t)?,
            })
        })
        .collect::<Result<Vec<_>, StatsError>>()?;

    let as_f64: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    let params = fit_lognormal_mle(&as_f64)?;
    let quality = fit_quality_cdf(&sizes, &params).ok();

    let n = dataset.len() as u64;
    let total_loc = dataset.total_loc();
    let total_size = estimate_total_size_corpus_rule(n)?.with_actual(total_loc as f64)?;
    let fitted_total_size = Some(estimate_total_size(n, &params)?.with_actual(total_loc as f64)?);
    let corpus = CorpusDefaults::params();
    let ranges = options
        .ranges
        .iter()
        .map(|&(x1, x2)| {
            let actual = sizes.iter().filter(|&&s| s >= x1 && s <= x2).count();
            let r = estimate_count_in_range(n, x1 as f64, x2 as f64, &corpus)?;
            Ok(RangeEstimate {
                x1,
                x2,
                result: with_optional_count(r, actual as f64)?,
            })
        })
        .collect::<Result<Vec<_>, EstimateError>>()?;

    let mut defects = Vec::new();
    for kind in [DefectKind::Pre, DefectKind::Post] {
        if !dataset.has_defects(kind) {
            continue;
        }
        let curve = match alberg_curve(dataset, kind) {
            Ok(c) => c,
            Err(DefectError::ZeroDefects(_)) => continue,
            Err(e) => return Err(e.into()),
        };
        let table = concentration_table(dataset, kind, &options.top_percents)?;
        let (weibull, weibull_error) = match fit_defect_weibull(&curve) {
            Ok(fit) => (Some(fit), None),
            Err(e) => (None, Some(e.to_string())),
        };
        defects.push(DefectSection {
            kind,
            total_defects: curve.total_defects,
            concentration: table.rows,
            weibull,
            weibull_error,
        });
    }

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        generated_unix: options.generated_unix,
        dataset: DatasetIdentity {
            name: dataset.name.clone(),
            version_label: dataset.version_label.clone(),
            programs: dataset.len(),
            total_loc,
        },
        descriptive,
        size_shares,
        lognormal: LognormalSection { params, quality },
        estimation: EstimationSection {
            corpus_params: corpus,
            rule_constant: CorpusDefaults::rule_constant(),
            total_size,
            fitted_total_size,
            ranges,
        },
        defects,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

pub fn emit_report(report: &AnalysisReport, format: ReportFormat) -> Result<String, ReportError> {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| ReportError::Serialize(e.to_string())),
        ReportFormat::Csv => Ok(report_csv(report)),
    }
}

pub fn parse_report(json: &str) -> Result<AnalysisReport, ReportError> {
    serde_json::from_str(json).map_err(|e| ReportError::Serialize(e.to_string()))
}

fn report_csv(r: &AnalysisReport) -> String {
    let mut rows: Vec<(String, String, String)> = Vec::new();
    let mut push = |s: &str, k: String, v: String| rows.push((s.to_string(), k, v));
    let d = &r.descriptive;
    for (k, v) in [
        ("n", d.n.to_string()),
        ("min", d.min.to_string()),
        ("median", d.median.to_string()),
        ("max", d.max.to_string()),
        ("mode", d.mode.to_string()),
        ("mean", d.mean.to_string()),
        ("std_dev", d.std_dev.to_string()),
    ] {
        push("descriptive", k.into(), v);
    }
    for s in &r.size_shares {
        push("size_share", format!("below_{}", s.threshold), s.below.to_string());
        push("size_share", format!("above_{}", s.threshold), s.above.to_string());
    }
    push("lognormal", "mu".into(), r.lognormal.params.mu.to_string());
    push("lognormal", "sigma".into(), r.lognormal.params.sigma.to_string());
    if let Some(q) = &r.lognormal.quality {
        push("lognormal", "r_squared".into(), q.r_squared.to_string());
        push("lognormal", "se".into(), q.se.to_string());
    }
    let est = |prefix: &str, e: &EstimationResult, push: &mut dyn FnMut(&str, String, String)| {
        push("estimation", format!("{prefix}_estimate"), e.rounded.to_string());
        if let (Some(a), Some(m)) = (e.actual, e.mre) {
            push("estimation", format!("{prefix}_actual"), a.to_string());
            push("estimation", format!("{prefix}_mre"), m.to_string());
        }
    };
    est("total_size", &r.estimation.total_size, &mut push);
    for range in &r.estimation.ranges {
        est(&format!("count_{}_{}", range.x1, range.x2), &range.result, &mut push);
    }
    for sec in &r.defects {
        let s = format!("defects_{}", sec.kind);
        for row in &sec.concentration {
            push(&s, format!("top_{}", row.top_percent), row.defect_share.to_string());
        }
        if let Some(w) = &sec.weibull {
            push(&s, "weibull_gamma".into(), w.params.gamma.to_string());
            push(&s, "weibull_beta".into(), w.params.beta.to_string());
            push(&s, "weibull_r_squared".into(), w.quality.r_squared.to_string());
            push(&s, "weibull_se".into(), w.quality.se.to_string());
        }
    }
    let mut out = String::from("section,key,value\n");
    for (s, k, v) in rows {
        out.push_str(&format!("{s},{k},{v}\n"));
    }
    out
}
