//! Size-ranked defect concentration.
//!
//! Programs are ranked from largest to smallest LOC (ties by id) and defects
//! are accumulated along that ranking. The resulting Alberg curve maps the
//! fraction of programs inspected to the fraction of defects they hold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimate::round_half_up;
use crate::fit::{fit_weibull, FitError, WeibullFit};
use crate::ingest::{Dataset, DefectKind};

pub const DEFAULT_TOP_PERCENTS: [f64; 5] = [5.0, 10.0, 15.0, 20.0, 25.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DefectError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset lacks {0}-release defect counts for some or all programs")]
    MissingDefectData(DefectKind),
    #[error("dataset has no {0}-release defects")]
    ZeroDefects(DefectKind),
    #[error("top percentage must lie in (0, 100], got {0}")]
    BadPercent(f64),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error(transparent)]
    Fit(#[from] FitError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlbergPoint {
    pub program_fraction: f64,
    pub defect_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlbergCurve {
    pub kind: DefectKind,
    pub total_defects: u64,
    pub points: Vec<AlbergPoint>,
}

impl AlbergCurve {
    /// At most `max_points` points, evenly spaced in program fraction and
    /// always ending at (1, 1). For plotting only.
    pub fn downsampled(&self, max_points: usize) -> Vec<AlbergPoint> {
        let n = self.points.len();
        if max_points == 0 {
            return Vec::new();
        }
        if n <= max_points {
            return self.points.clone();
        }
        (1..=max_points)
            .map(|j| self.points[(j * n).div_ceil(max_points) - 1])
            .collect()
    }

    pub fn as_xy(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .map(|p| (p.program_fraction, p.defect_fraction))
            .collect()
    }

    fn validate(&self) -> Result<(), DefectError> {
        let bad = |m: &str| Err(DefectError::InvalidCurve(m.into()));
        if self.points.is_empty() {
            return bad("no points");
        }
        for (i, p) in self.points.iter().enumerate() {
            if !(p.program_fraction > 0.0 && p.program_fraction <= 1.0) {
                return bad("program fraction outside (0, 1]");
            }
            if !(0.0..=1.0).contains(&p.defect_fraction) {
                return bad("defect fraction outside [0, 1]");
            }
            if i > 0 {
                let q = &self.points[i - 1];
                if p.program_fraction <= q.program_fraction {
                    return bad("program fraction not strictly increasing");
                }
                if p.defect_fraction < q.defect_fraction {
                    return bad("defect fraction decreasing");
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub top_percent: f64,
    /// Number of largest programs taken.
    pub programs: usize,
    pub defect_share: f64,
    /// A group of equal-LOC programs is split by the cut, so the share
    /// depends on the id tie-break.
    pub tie_straddles_cut: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationTable {
    pub kind: DefectKind,
    pub rows: Vec<ConcentrationRow>,
}

struct Ranked {
    locs: Vec<u64>,
    cumulative: Vec<u64>,
    total: u64,
}

fn rank(dataset: &Dataset, kind: DefectKind) -> Result<Ranked, DefectError> {
    if dataset.is_empty() {
        return Err(DefectError::EmptyDataset);
    }
    if !dataset.has_defects(kind) {
        return Err(DefectError::MissingDefectData(kind));
    }
    let ranked = dataset.ranked_by_size();
    let mut cumulative = Vec::with_capacity(ranked.len() + 1);
    cumulative.push(0);
    let mut sum = 0u64;
    for r in &ranked {
        sum += r.defects(kind).unwrap_or(0);
        cumulative.push(sum);
    }
    if sum == 0 {
        return Err(DefectError::ZeroDefects(kind));
    }
    Ok(Ranked {
        locs: ranked.iter().map(|r| r.loc).collect(),
        cumulative,
        total: sum,
    })
}

fn fraction(part: u64, whole: u64) -> f64 {
    if part == whole {
        1.0
    } else {
        part as f64 / whole as f64
    }
}

pub fn alberg_curve(dataset: &Dataset, kind: DefectKind) -> Result<AlbergCurve, DefectError> {
    let ranked = rank(dataset, kind)?;
    let n = ranked.locs.len();
    let points = (1..=n)
        .map(|k| AlbergPoint {
            program_fraction: fraction(k as u64, n as u64),
            defect_fraction: fraction(ranked.cumulative[k], ranked.total),
        })
        .collect();
    Ok(AlbergCurve {
        kind,
        total_defects: ranked.total,
        points,
    })
}

/// Share of defects held by the top `p`% largest programs, for each `p`.
///
/// The cut takes `round_half_up(p·n/100)` programs.
pub fn concentration_table(
    dataset: &Dataset,
    kind: DefectKind,
    percents: &[f64],
) -> Result<ConcentrationTable, DefectError> {
    if let Some(&p) = percents.iter().find(|&&p| !(p > 0.0 && p <= 100.0)) {
        return Err(DefectError::BadPercent(p));
    }
    let ranked = rank(dataset, kind)?;
    let n = ranked.locs.len();
    let rows = percents
        .iter()
        .map(|&p| {
            let k = (round_half_up(p * n as f64 / 100.0) as usize).min(n);
            ConcentrationRow {
                top_percent: p,
                programs: k,
                defect_share: fraction(ranked.cumulative[k], ranked.total),
                tie_straddles_cut: k > 0 && k < n && ranked.locs[k - 1] == ranked.locs[k],
            }
        })
        .collect();
    Ok(ConcentrationTable { kind, rows })
}

/// Weibull fit of an Alberg curve at full per-program resolution.
pub fn fit_defect_weibull(curve: &AlbergCurve) -> Result<WeibullFit, DefectError> {
    curve.validate()?;
    Ok(fit_weibull(&curve.as_xy())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fit::WeibullParams;
    use crate::ingest::ProgramRecord;
    use proptest::prelude::*;

    fn ds(rows: &[(&str, u64, u64)]) -> Dataset {
        let recs = rows
            .iter()
            .map(|&(id, loc, d)| ProgramRecord::new(id, loc, Some(d), Some(d)).unwrap())
            .collect();
        Dataset::new("t", "1", recs).unwrap()
    }

    #[test]
    fn two_program_curve() {
        let c = alberg_curve(&ds(&[("a", 10, 3), ("b", 5, 1)]), DefectKind::Pre).unwrap();
        assert_eq!(
            c.points,
            [
                AlbergPoint { program_fraction: 0.5, defect_fraction: 0.75 },
                AlbergPoint { program_fraction: 1.0, defect_fraction: 1.0 },
            ]
        );
    }

    #[test]
    fn all_defects_in_largest() {
        let c = alberg_curve(&ds(&[("a", 3, 0), ("b", 50, 7), ("c", 9, 0)]), DefectKind::Post)
            .unwrap();
        assert_eq!(c.points[0].defect_fraction, 1.0);
    }

    #[test]
    fn errors() {
        let no_defects = ds(&[("a", 3, 0), ("b", 4, 0)]);
        assert_eq!(
            alberg_curve(&no_defects, DefectKind::Pre),
            Err(DefectError::ZeroDefects(DefectKind::Pre))
        );
        let sized = Dataset::new("t", "1", vec![ProgramRecord::sized("a", 3).unwrap()]).unwrap();
        assert_eq!(
            alberg_curve(&sized, DefectKind::Pre),
            Err(DefectError::MissingDefectData(DefectKind::Pre))
        );
        let empty = Dataset::new("t", "1", vec![]).unwrap();
        assert_eq!(alberg_curve(&empty, DefectKind::Pre), Err(DefectError::EmptyDataset));
        let d = ds(&[("a", 3, 1)]);
        assert_eq!(
            concentration_table(&d, DefectKind::Pre, &[0.0]),
            Err(DefectError::BadPercent(0.0))
        );
        assert!(concentration_table(&d, DefectKind::Pre, &[100.5]).is_err());
    }

    #[test]
    fn concentration_rows() {
        let rows: Vec<(String, u64, u64)> =
            (0..20).map(|i| (format!("p{i:02}"), 100 - i as u64, i as u64 % 3)).collect();
        let rows: Vec<(&str, u64, u64)> = rows.iter().map(|(a, b, c)| (a.as_str(), *b, *c)).collect();
        let d = ds(&rows);
        let t = concentration_table(&d, DefectKind::Pre, &[5.0, 10.0, 12.5, 100.0]).unwrap();
        // total = 19 programs' i % 3 summed: 0+1+2 repeating
        let total: u64 = (0..20).map(|i| i % 3).sum();
        assert_eq!(t.rows[0].programs, 1);
        assert_eq!(t.rows[0].defect_share, 0.0);
        assert_eq!(t.rows[1].programs, 2);
        assert_eq!(t.rows[1].defect_share, 1.0 / total as f64);
        // 12.5% of 20 = 2.5 → 3 programs
        assert_eq!(t.rows[2].programs, 3);
        assert_eq!(t.rows[2].defect_share, 3.0 / total as f64);
        assert_eq!(t.rows[3].defect_share, 1.0);
        assert!(t.rows.iter().all(|r| !r.tie_straddles_cut));
    }

    #[test]
    fn tie_at_cut_is_flagged() {
        let d = ds(&[("a", 9, 1), ("b", 5, 1), ("c", 5, 1), ("d", 1, 1)]);
        let t = concentration_table(&d, DefectKind::Pre, &[50.0, 25.0, 75.0]).unwrap();
        // 50% takes a and one of the two 5-LOC programs.
        assert!(t.rows[0].tie_straddles_cut);
        assert!(!t.rows[1].tie_straddles_cut);
        assert!(!t.rows[2].tie_straddles_cut);
        let t = concentration_table(&d, DefectKind::Pre, &[37.5]).unwrap();
        assert_eq!(t.rows[0].programs, 2);
        assert!(t.rows[0].tie_straddles_cut);
    }

    #[test]
    fn downsampling_keeps_endpoint() {
        let rows: Vec<(String, u64, u64)> =
            (0..2500).map(|i| (format!("p{i:05}"), 3000 - i as u64, 1)).collect();
        let rows: Vec<(&str, u64, u64)> = rows.iter().map(|(a, b, c)| (a.as_str(), *b, *c)).collect();
        let c = alberg_curve(&ds(&rows), DefectKind::Pre).unwrap();
        let s = c.downsampled(1000);
        assert_eq!(s.len(), 1000);
        assert_eq!(s.last().unwrap().program_fraction, 1.0);
        assert!(s.windows(2).all(|w| w[0].program_fraction < w[1].program_fraction));
        assert_eq!(c.downsampled(5000).len(), 2500);
    }

    #[test]
    fn synthetic_curve_recovers_weibull() {
        let truth = WeibullParams::new(0.259, 0.897).unwrap();
        let n = 400;
        let curve = AlbergCurve {
            kind: DefectKind::Pre,
            total_defects: 1,
            points: (1..=n)
                .map(|k| {
                    let x = k as f64 / n as f64;
                    AlbergPoint {
                        program_fraction: x,
                        defect_fraction: truth.cdf(x),
                    }
                })
                .collect(),
        };
        let fit = fit_defect_weibull(&curve).unwrap();
        assert!(fit.converged);
        assert!((fit.params.gamma - 0.259).abs() < 1e-3);
        assert!((fit.params.beta - 0.897).abs() < 1e-3);
    }

    #[test]
    fn invalid_curve_rejected() {
        let c = AlbergCurve {
            kind: DefectKind::Pre,
            total_defects: 1,
            points: vec![
                AlbergPoint { program_fraction: 0.5, defect_fraction: 0.9 },
                AlbergPoint { program_fraction: 0.4, defect_fraction: 1.0 },
            ],
        };
        assert!(matches!(fit_defect_weibull(&c), Err(DefectError::InvalidCurve(_))));
    }

    fn arb_dataset() -> impl Strategy<Value = Vec<(u64, u64)>> {
        prop::collection::vec((1u64..300, 0u64..20), 2..80)
            .prop_filter("needs defects", |v| v.iter().any(|r| r.1 > 0))
    }

    fn build(rows: &[(u64, u64)], label: impl Fn(usize) -> String) -> Dataset {
        let recs = rows
            .iter()
            .enumerate()
            .map(|(i, &(loc, d))| ProgramRecord::new(label(i), loc, Some(d), None).unwrap())
            .collect();
        Dataset::new("t", "1", recs).unwrap()
    }

    proptest! {
        #[test]
        fn curve_is_monotone_and_matches_table(rows in arb_dataset(), p in 0.5f64..100.0) {
            let d = build(&rows, |i| format!("f{i:03}"));
            let c = alberg_curve(&d, DefectKind::Pre).unwrap();
            let last = c.points.last().unwrap();
            prop_assert_eq!((last.program_fraction, last.defect_fraction), (1.0, 1.0));
            for w in c.points.windows(2) {
                prop_assert!(w[0].program_fraction < w[1].program_fraction);
                prop_assert!(w[0].defect_fraction <= w[1].defect_fraction);
            }
            let t = concentration_table(&d, DefectKind::Pre, &[p, 100.0]).unwrap();
            let k = t.rows[0].programs;
            let expected = if k == 0 { 0.0 } else { c.points[k - 1].defect_fraction };
            prop_assert_eq!(t.rows[0].defect_share, expected);
            prop_assert_eq!(t.rows[1].defect_share, 1.0);
        }

        #[test]
        fn relabeling_preserves_untied_cuts(rows in arb_dataset()) {
            let a = build(&rows, |i| format!("f{i:03}"));
            let b = build(&rows, |i| format!("g{:03}", 999 - i));
            let ca = alberg_curve(&a, DefectKind::Pre).unwrap();
            let cb = alberg_curve(&b, DefectKind::Pre).unwrap();
            let mut locs: Vec<u64> = rows.iter().map(|r| r.0).collect();
            locs.sort_unstable_by(|x, y| y.cmp(x));
            for k in 1..=locs.len() {
                let untied = k == locs.len() || locs[k - 1] != locs[k];
                if untied {
                    prop_assert_eq!(ca.points[k - 1], cb.points[k - 1]);
                }
            }
        }
    }
}
