//! Plot data: CSV series plus static SVG line charts.
//!
//! Every CSV starts with `#` comment lines naming its columns, followed by a
//! header row. SVGs are self-contained (no scripts, fonts or links).
//! Output is a pure function of the input, so repeated emission is
//! byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::defects::AlbergCurve;
use crate::fit::{LognormalParams, WeibullParams};
use crate::stats::{empirical_cdf, rank_size_curve};

/// Alberg curves are thinned to this many points in plot files.
pub const MAX_PLOT_POINTS: usize = 1000;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 40.0;
const MARGIN_TOP: f64 = 60.0;
const MARGIN_BOTTOM: f64 = 70.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("nothing to plot: {0}")]
    EmptyData(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log10,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<Series>,
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn transform(v: f64, scale: Scale) -> Option<f64> {
    match scale {
        Scale::Linear => v.is_finite().then_some(v),
        Scale::Log10 => (v > 0.0 && v.is_finite()).then(|| v.log10()),
    }
}

fn tick_label(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e9 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn ticks(lo: f64, hi: f64, scale: Scale) -> Vec<(f64, String)> {
    match scale {
        Scale::Linear => (0..=5)
            .map(|i| {
                let t = lo + (hi - lo) * i as f64 / 5.0;
                (t, tick_label(t))
            })
            .collect(),
        Scale::Log10 => {
            let (a, b) = (lo.floor() as i32, hi.ceil() as i32);
            (a..=b)
                .filter(|&e| (e as f64) >= lo - 1e-9 && (e as f64) <= hi + 1e-9)
                .map(|e| (e as f64, tick_label(10f64.powi(e))))
                .collect()
        }
    }
}

impl LineChart {
    pub fn render_svg(&self) -> String {
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

        let transformed: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter_map(|&(x, y)| Some((transform(x, self.x_scale)?, transform(y, self.y_scale)?)))
                    .collect()
            })
            .collect();
        let all = transformed.iter().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if self.y_scale == Scale::Linear && y0 > 0.0 {
            y0 = 0.0;
        }
        if x1 - x0 <= 0.0 {
            x1 = x0 + 1.0;
        }
        if y1 - y0 <= 0.0 {
            y1 = y0 + 1.0;
        }
        let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
        let py = |y: f64| MARGIN_TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

        let mut svg = String::new();
        let _ = write!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
        );
        svg.push('\n');
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="32" text-anchor="middle" font-family="sans-serif" font-size="18">{}</text>"#,
            WIDTH / 2.0,
            escape_xml(&self.title)
        );

        for (t, label) in ticks(x0, x1, self.x_scale) {
            let x = px(t);
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e5e5e5"/>"##,
                MARGIN_TOP,
                MARGIN_TOP + plot_h
            );
            let _ = writeln!(
                svg,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
                MARGIN_TOP + plot_h + 18.0,
                escape_xml(&label)
            );
        }
        for (t, label) in ticks(y0, y1, self.y_scale) {
            let y = py(t);
            let _ = writeln!(
                svg,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e5e5e5"/>"##,
                MARGIN_LEFT,
                MARGIN_LEFT + plot_w
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="12">{}</text>"#,
                MARGIN_LEFT - 8.0,
                y + 4.0,
                escape_xml(&label)
            );
        }

        // axes
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333" stroke-width="1.5"/>"##,
            MARGIN_TOP + plot_h,
            MARGIN_LEFT + plot_w,
            MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{:.2}" stroke="#333" stroke-width="1.5"/>"##,
            MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            HEIGHT - 20.0,
            escape_xml(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="20" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 20 {:.1})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape_xml(&self.y_label)
        );

        for (i, (series, pts)) in self.series.iter().zip(&transformed).enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            if !pts.is_empty() {
                let mut d = String::new();
                for (j, &(x, y)) in pts.iter().enumerate() {
                    let _ = write!(d, "{}{:.2} {:.2}", if j == 0 { "M" } else { " L" }, px(x), py(y));
                }
                let _ = writeln!(
                    svg,
                    r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#
                );
            }
            let ly = MARGIN_TOP + 10.0 + i as f64 * 20.0;
            let lx = MARGIN_LEFT + plot_w - 190.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/>"#,
                lx + 24.0
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="12">{}</text>"#,
                lx + 30.0,
                ly + 4.0,
                escape_xml(&series.name)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Renders a CSV document: `#` comment lines, header row, data rows.
pub fn render_csv(comments: &[String], columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "{}", columns.join(","));
    for r in rows {
        let _ = writeln!(out, "{}", r.join(","));
    }
    out
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, PlotError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| PlotError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<(), PlotError> {
    fs::create_dir_all(dir).map_err(|source| PlotError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

pub fn rank_size_csv(sizes: &[u64]) -> Result<String, PlotError> {
    let curve = rank_size_curve(sizes).map_err(|e| PlotError::EmptyData(e.to_string()))?;
    let rows: Vec<Vec<String>> = curve
        .iter()
        .map(|(r, s)| vec![r.to_string(), s.to_string()])
        .collect();
    Ok(render_csv(
        &[
            "rank-size curve, largest program first".into(),
            "rank: 1-based position after sorting by LOC descending".into(),
            "loc: program size in lines of code".into(),
        ],
        &["rank", "loc"],
        &rows,
    ))
}

/// `rank_size.csv` and `rank_size.svg` (log-scaled size axis).
pub fn emit_rank_size(sizes: &[u64], dir: &Path) -> Result<Vec<PathBuf>, PlotError> {
    let csv = rank_size_csv(sizes)?;
    let curve = rank_size_curve(sizes).map_err(|e| PlotError::EmptyData(e.to_string()))?;
    let chart = LineChart {
        title: "Program sizes ranked from largest to smallest".into(),
        x_label: "rank".into(),
        y_label: "LOC".into(),
        x_scale: Scale::Linear,
        y_scale: Scale::Log10,
        series: vec![Series {
            name: "program size".into(),
            points: curve.iter().map(|&(r, s)| (r as f64, s as f64)).collect(),
        }],
    };
    ensure_dir(dir)?;
    Ok(vec![
        write_file(dir, "rank_size.csv", &csv)?,
        write_file(dir, "rank_size.svg", &chart.render_svg())?,
    ])
}

/// `size_cdf.csv` / `size_cdf.svg`: empirical CDF, with the model CDF when
/// parameters are given.
pub fn emit_cdf(
    sizes: &[u64],
    model: Option<&LognormalParams>,
    dir: &Path,
) -> Result<Vec<PathBuf>, PlotError> {
    let ecdf = empirical_cdf(sizes).map_err(|e| PlotError::EmptyData(e.to_string()))?;
    let mut comments = vec![
        "empirical size distribution, one row per distinct size".into(),
        "loc: program size in lines of code".into(),
        "empirical_fraction: share of programs with size <= loc".into(),
    ];
    let mut columns = vec!["loc", "empirical_fraction"];
    if let Some(p) = model {
        comments.push(format!(
            "lognormal_fraction: lognormal CDF at loc (mu={}, sigma={})",
            p.mu, p.sigma
        ));
        columns.push("lognormal_fraction");
    }
    let rows: Vec<Vec<String>> = ecdf
        .points()
        .iter()
        .map(|pt| {
            let mut r = vec![pt.size.to_string(), pt.fraction.to_string()];
            if let Some(p) = model {
                r.push(p.cdf(pt.size as f64).to_string());
            }
            r
        })
        .collect();
    let mut series = vec![Series {
        name: "empirical".into(),
        points: ecdf
            .points()
            .iter()
            .map(|p| (p.size as f64, p.fraction))
            .collect(),
    }];
    if let Some(p) = model {
        series.push(Series {
            name: "lognormal".into(),
            points: ecdf
                .points()
                .iter()
                .map(|pt| (pt.size as f64, p.cdf(pt.size as f64)))
                .collect(),
        });
    }
    let chart = LineChart {
        title: "Cumulative distribution of program sizes".into(),
        x_label: "LOC".into(),
        y_label: "fraction of programs".into(),
        x_scale: Scale::Log10,
        y_scale: Scale::Linear,
        series,
    };
    ensure_dir(dir)?;
    Ok(vec![
        write_file(dir, "size_cdf.csv", &render_csv(&comments, &columns, &rows))?,
        write_file(dir, "size_cdf.svg", &chart.render_svg())?,
    ])
}

/// `alberg_<kind>.csv` / `.svg`: the size-ranked defect curve, thinned to
/// [`MAX_PLOT_POINTS`], with a Weibull overlay when parameters are given.
pub fn emit_alberg(
    curve: &AlbergCurve,
    model: Option<&WeibullParams>,
    dir: &Path,
) -> Result<Vec<PathBuf>, PlotError> {
    if curve.points.is_empty() {
        return Err(PlotError::EmptyData("empty Alberg curve".into()));
    }
    let pts = curve.downsampled(MAX_PLOT_POINTS);
    let mut comments = vec![
        format!(
            "{}-release defects accumulated over programs ranked by LOC descending",
            curve.kind
        ),
        "program_fraction: share of programs taken from the largest down".into(),
        "defect_fraction: share of all defects held by those programs".into(),
    ];
    let mut columns = vec!["program_fraction", "defect_fraction"];
    if let Some(w) = model {
        comments.push(format!(
            "weibull_fraction: fitted Weibull CDF (gamma={}, beta={})",
            w.gamma, w.beta
        ));
        columns.push("weibull_fraction");
    }
    let rows: Vec<Vec<String>> = pts
        .iter()
        .map(|p| {
            let mut r = vec![p.program_fraction.to_string(), p.defect_fraction.to_string()];
            if let Some(w) = model {
                r.push(w.cdf(p.program_fraction).to_string());
            }
            r
        })
        .collect();
    let mut series = vec![Series {
        name: format!("{}-release defects", curve.kind),
        points: pts
            .iter()
            .map(|p| (p.program_fraction, p.defect_fraction))
            .collect(),
    }];
    if let Some(w) = model {
        series.push(Series {
            name: "Weibull fit".into(),
            points: pts
                .iter()
                .map(|p| (p.program_fraction, w.cdf(p.program_fraction)))
                .collect(),
        });
    }
    let chart = LineChart {
        title: format!(
            "Cumulative {}-release defects, programs ranked by size",
            curve.kind
        ),
        x_label: "cumulative fraction of programs".into(),
        y_label: "cumulative fraction of defects".into(),
        x_scale: Scale::Linear,
        y_scale: Scale::Linear,
        series,
    };
    ensure_dir(dir)?;
    let stem = format!("alberg_{}", curve.kind);
    Ok(vec![
        write_file(dir, &format!("{stem}.csv"), &render_csv(&comments, &columns, &rows))?,
        write_file(dir, &format!("{stem}.svg"), &chart.render_svg())?,
    ])
}
