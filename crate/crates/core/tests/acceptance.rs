//! Acceptance checks, one status line per criterion.
//!
//! Criteria 7-12 need the public Eclipse defect dataset. Point
//! `ECLIPSE_DATASET_DIR` at a directory holding `files-2.0.csv`,
//! `files-2.1.csv` and `files-3.0.csv`; without it they are reported as SKIP.

use std::fs;
use std::hint::black_box;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use progsize::defects::{alberg_curve, concentration_table, fit_defect_weibull, DEFAULT_TOP_PERCENTS};
use progsize::estimate::{
    estimate_count_in_range, estimate_total_size_corpus_rule, expected_program_size, mre,
    CorpusDefaults,
};
use progsize::fit::{fit_lognormal_mle, fit_quality_cdf, fit_weibull, LognormalParams, WeibullParams};
use progsize::ingest::eclipse::import_eclipse_file;
use progsize::ingest::{Dataset, DefectKind};
use progsize::loc::{count_loc, LanguageProfile};
use progsize::report::{build_report, ReportOptions};
use progsize::stats::{describe, share_above, share_below};

type Outcome = Result<String, String>;
type DatasetCheck = fn(&[Dataset]) -> Outcome;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn close(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

// 1 -----------------------------------------------------------------------

fn corpus_expected_size() -> Outcome {
    let p = CorpusDefaults::params();
    let value = expected_program_size(&p);
    let reps = 10_000u32;
    let start = Instant::now();
    for _ in 0..reps {
        black_box(expected_program_size(black_box(&p)));
    }
    let per_call = start.elapsed() / reps;
    check(
        close(value, 113.88, 0.01) && per_call < Duration::from_millis(1),
        format!("expected size {value:.4}, {per_call:?} per call"),
    )
}

// 2 -----------------------------------------------------------------------

fn total_size_estimates() -> Outcome {
    let rows = [
        (6729u64, 796_941.0, 766_299u64, 0.0385),
        (7888, 987_603.0, 898_285, 0.0904),
        (10593, 1_305_908.0, 1_206_331, 0.0763),
    ];
    let mut details = Vec::new();
    let mut ok = true;
    for (n, actual, rounded, table_mre) in rows {
        let r = estimate_total_size_corpus_rule(n)
            .and_then(|r| r.with_actual(actual))
            .map_err(|e| e.to_string())?;
        let m = r.mre.unwrap();
        let m_rounded = mre(actual, r.rounded as f64).map_err(|e| e.to_string())?;
        ok &= r.rounded == rounded
            && close(m, table_mre, 1e-4)
            && close(m_rounded, table_mre, 1e-4)
            && r.acceptable == Some(true);
        details.push(format!("{n}: {} (MRE {:.2}%)", r.rounded, 100.0 * m));
    }
    check(ok, details.join(", "))
}

// 3 -----------------------------------------------------------------------

fn interval_estimate() -> Outcome {
    let p = CorpusDefaults::params();
    let r = estimate_count_in_range(10593, 1024.0, 2048.0, &p).map_err(|e| e.to_string())?;
    let (f1, f2) = (p.cdf(1024.0), p.cdf(2048.0));
    check(
        r.rounded == 87 && close(f1, 0.9894, 1e-4) && close(f2, 0.9976, 1e-4),
        format!("count {}, F(1024) {f1:.4}, F(2048) {f2:.4}", r.rounded),
    )
}

// 4 -----------------------------------------------------------------------

/// E[X] by composite Simpson over t = ln x, where the integrand
/// x f(x) dx becomes e^t φ((t-μ)/σ)/σ dt.
fn quadrature_mean(mu: f64, sigma: f64) -> f64 {
    let center = mu + sigma * sigma;
    let (a, b) = (center - 14.0 * sigma, center + 14.0 * sigma);
    let n = 20_000;
    let h = (b - a) / n as f64;
    let g = |t: f64| {
        let z = (t - mu) / sigma;
        t.exp() * (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    let mut sum = g(a) + g(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(a + i as f64 * h);
    }
    sum * h / 3.0
}

fn analytic_vs_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_080_613);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mu = rng.gen_range(1.0..6.0);
        let sigma = rng.gen_range(0.3..2.0);
        let analytic = expected_program_size(&LognormalParams { mu, sigma });
        let numeric = quadrature_mean(mu, sigma);
        worst = worst.max((analytic - numeric).abs() / numeric);
    }
    check(worst < 1e-3, format!("20 pairs, worst relative gap {worst:.2e}"))
}

// 5 -----------------------------------------------------------------------

fn property_suites() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let n = rng.gen_range(2..300);
        let sizes: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..5000.0f64).round()).collect();
        let k = rng.gen_range(0.01..100.0f64);
        let scaled: Vec<f64> = sizes.iter().map(|s| s * k).collect();
        let (Ok(a), Ok(b)) = (fit_lognormal_mle(&sizes), fit_lognormal_mle(&scaled)) else {
            continue;
        };
        if !close(b.mu, a.mu + k.ln(), 1e-9) || !close(b.sigma, a.sigma, 1e-9 * a.sigma.max(1.0)) {
            return Err(format!("scale equivariance broken for k = {k}"));
        }
    }

    let grid = [0.1, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
    let mut worst: f64 = 0.0;
    for &gamma in &grid {
        for &beta in &grid {
            let truth = WeibullParams::new(gamma, beta).map_err(|e| e.to_string())?;
            let n = 200;
            let pts: Vec<(f64, f64)> = (1..=n)
                .map(|k| {
                    let x = k as f64 / n as f64;
                    (x, truth.cdf(x))
                })
                .collect();
            let fit = fit_weibull(&pts).map_err(|e| format!("γ={gamma}, β={beta}: {e}"))?;
            let err = (fit.params.gamma - gamma).abs().max((fit.params.beta - beta).abs());
            if err > 1e-3 || !fit.converged {
                return Err(format!("γ={gamma}, β={beta}: recovered {:?}", fit.params));
            }
            worst = worst.max(err);
        }
    }
    let elapsed = start.elapsed();
    check(
        elapsed < Duration::from_secs(10),
        format!("200 scale cases, 49 Weibull grid points (worst {worst:.1e}), {elapsed:.2?}"),
    )
}

// 6 -----------------------------------------------------------------------

fn fixture_corpus() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/loc");
    let manifest = fs::read_to_string(dir.join("expected.csv")).map_err(|e| e.to_string())?;
    let java = LanguageProfile::java();
    let mut n = 0;
    let mut wrong = Vec::new();
    for line in manifest.lines().skip(1) {
        let (name, expected) = line.split_once(',').ok_or("bad manifest line")?;
        let expected: u64 = expected.parse().map_err(|_| "bad manifest count")?;
        let bytes = fs::read(dir.join(name)).map_err(|e| e.to_string())?;
        let text = String::from_utf8(bytes).map_err(|e| e.to_string())?;
        let got = count_loc(text.strip_prefix('\u{feff}').unwrap_or(&text), &java);
        if got != expected {
            wrong.push(format!("{name}: {got} != {expected}"));
        }
        n += 1;
    }
    if n < 20 {
        return Err(format!("only {n} fixtures"));
    }
    check(wrong.is_empty(), if wrong.is_empty() { format!("{n} files match") } else { wrong.join("; ") })
}

// 7-12 --------------------------------------------------------------------

const VERSIONS: [&str; 3] = ["2.0", "2.1", "3.0"];

struct Table1Row {
    programs: usize,
    min: u64,
    median: f64,
    max: u64,
    mode: u64,
    mean: f64,
    std_dev: f64,
}

const TABLE1: [Table1Row; 3] = [
    Table1Row { programs: 6729, min: 3, median: 51.0, max: 5207, mode: 7, mean: 118.43, std_dev: 219.98 },
    Table1Row { programs: 7888, min: 3, median: 54.0, max: 5228, mode: 7, mean: 125.20, std_dev: 233.79 },
    Table1Row { programs: 10593, min: 3, median: 51.0, max: 4886, mode: 5, mean: 123.28, std_dev: 233.49 },
];

const TABLE2: [(f64, f64); 3] = [(3.9006, 1.3451), (3.9383, 1.3621), (3.9006, 1.3744)];

/// Defect share of the top 5..25% largest programs, pre then post.
const TABLE5: [[[f64; 5]; 3]; 2] = [
    [
        [24.57, 37.01, 46.99, 53.48, 60.33],
        [28.82, 43.46, 53.97, 61.01, 68.20],
        [32.98, 46.28, 55.05, 62.29, 68.93],
    ],
    [
        [34.16, 46.87, 55.73, 61.88, 67.85],
        [28.09, 40.52, 47.72, 54.31, 60.49],
        [29.97, 44.05, 52.41, 60.62, 67.53],
    ],
];

/// Weibull (γ, β), pre then post.
const TABLE6: [[(f64, f64); 3]; 2] = [
    [(0.259, 0.897), (0.207, 0.830), (0.193, 0.780)],
    [(0.190, 0.811), (0.242, 0.853), (0.203, 0.827)],
];

const KINDS: [DefectKind; 2] = [DefectKind::Pre, DefectKind::Post];

fn dataset_dir() -> Option<PathBuf> {
    let dir = PathBuf::from(std::env::var_os("ECLIPSE_DATASET_DIR")?);
    VERSIONS
        .iter()
        .all(|v| dir.join(format!("files-{v}.csv")).is_file())
        .then_some(dir)
}

fn load_versions(dir: &Path) -> Result<Vec<Dataset>, String> {
    VERSIONS
        .iter()
        .map(|v| import_eclipse_file(&dir.join(format!("files-{v}.csv")), v).map_err(|e| format!("{v}: {e}")))
        .collect()
}

fn record_counts(data: &[Dataset]) -> Outcome {
    let counts: Vec<usize> = data.iter().map(Dataset::len).collect();
    let want: Vec<usize> = TABLE1.iter().map(|r| r.programs).collect();
    check(counts == want, format!("{counts:?}"))
}

fn descriptive_stats(data: &[Dataset]) -> Outcome {
    let mut problems = Vec::new();
    for ((ds, row), v) in data.iter().zip(&TABLE1).zip(VERSIONS) {
        let d = describe(&ds.sizes()).map_err(|e| e.to_string())?;
        if d.min != row.min || d.median != row.median || d.max != row.max || d.mode != row.mode {
            problems.push(format!("{v}: min/median/max/mode {}/{}/{}/{}", d.min, d.median, d.max, d.mode));
        }
        if !close(d.mean, row.mean, 0.5) || !close(d.std_dev, row.std_dev, 0.5) {
            problems.push(format!("{v}: mean {:.2}, std {:.2}", d.mean, d.std_dev));
        }
    }
    check(problems.is_empty(), if problems.is_empty() { "3 versions match".into() } else { problems.join("; ") })
}

fn lognormal_fits(data: &[Dataset]) -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for ((ds, &(mu, sigma)), v) in data.iter().zip(&TABLE2).zip(VERSIONS) {
        let sizes = ds.sizes();
        let as_f64: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
        let p = fit_lognormal_mle(&as_f64).map_err(|e| e.to_string())?;
        let q = fit_quality_cdf(&sizes, &p).map_err(|e| e.to_string())?;
        ok &= close(p.mu, mu, 0.02) && close(p.sigma, sigma, 0.02) && q.r_squared >= 0.99;
        details.push(format!("{v}: μ {:.4} σ {:.4} R² {:.4}", p.mu, p.sigma, q.r_squared));
    }
    check(ok, details.join(", "))
}

fn concentration(data: &[Dataset]) -> Outcome {
    let mut off = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, kind) in KINDS.iter().enumerate() {
        for (i, ds) in data.iter().enumerate() {
            let t = concentration_table(ds, *kind, &DEFAULT_TOP_PERCENTS).map_err(|e| e.to_string())?;
            for (row, &want) in t.rows.iter().zip(&TABLE5[k][i]) {
                let gap = (100.0 * row.defect_share - want).abs();
                worst = worst.max(gap);
                if gap > 0.5 {
                    off.push(format!("{kind} {} top {}%: {:.2}", VERSIONS[i], row.top_percent, 100.0 * row.defect_share));
                }
            }
        }
    }
    check(off.is_empty(), if off.is_empty() { format!("30 cells, worst gap {worst:.2} pp") } else { off.join("; ") })
}

fn weibull_fits(data: &[Dataset]) -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for (k, kind) in KINDS.iter().enumerate() {
        for (i, ds) in data.iter().enumerate() {
            let curve = alberg_curve(ds, *kind).map_err(|e| e.to_string())?;
            let fit = fit_defect_weibull(&curve).map_err(|e| e.to_string())?;
            let (g, b) = TABLE6[k][i];
            ok &= close(fit.params.gamma, g, 0.03) && close(fit.params.beta, b, 0.03) && fit.quality.r_squared >= 0.98;
            details.push(format!(
                "{kind} {}: γ {:.3} β {:.3} R² {:.3}",
                VERSIONS[i], fit.params.gamma, fit.params.beta, fit.quality.r_squared
            ));
        }
    }
    check(ok, details.join(", "))
}

fn small_program_shares(data: &[Dataset]) -> Outcome {
    let sizes = data[2].sizes();
    let got = [
        share_below(&sizes, 32),
        share_below(&sizes, 64),
        share_above(&sizes, 512),
        share_above(&sizes, 1024),
    ];
    let want = [38.03, 56.42, 4.39, 1.13];
    let mut ok = true;
    let mut shown = Vec::new();
    for (g, w) in got.into_iter().zip(want) {
        let g = 100.0 * g.map_err(|e| e.to_string())?;
        ok &= close(g, w, 0.05);
        shown.push(format!("{g:.2}%"));
    }
    check(ok, shown.join(", "))
}

fn full_pipeline(dir: &Path) -> Outcome {
    let start = Instant::now();
    let data = load_versions(dir)?;
    for ds in &data {
        build_report(ds, &ReportOptions::default()).map_err(|e| e.to_string())?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), format!("{elapsed:.2?}"))
}

// -------------------------------------------------------------------------

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: &str, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS  {id:>2}  {name}: {detail}"),
        Err(detail) => {
            failed += 1;
            println!("FAIL  {id:>2}  {name}: {detail}");
        }
    };

    report("1", "corpus expected program size", corpus_expected_size());
    report("2", "total size estimates", total_size_estimates());
    report("3", "interval count estimate", interval_estimate());
    report("4", "analytic mean vs quadrature", analytic_vs_quadrature());
    report("5", "fit property suites", property_suites());
    report("6", "LOC fixture corpus", fixture_corpus());

    let conditional: [(&str, &str, DatasetCheck); 6] = [
        ("7", "record counts", record_counts),
        ("8", "descriptive statistics", descriptive_stats),
        ("9", "lognormal fits", lognormal_fits),
        ("10", "defect concentration", concentration),
        ("11", "Weibull defect fits", weibull_fits),
        ("12", "small program shares", small_program_shares),
    ];
    match dataset_dir() {
        None => {
            for (id, name, _) in conditional {
                println!("SKIP  {id:>2}  {name}: Eclipse dataset not found (set ECLIPSE_DATASET_DIR)");
            }
        }
        Some(dir) => match load_versions(&dir) {
            Err(e) => {
                for (id, name, _) in conditional {
                    report(id, name, Err(format!("dataset load failed: {e}")));
                }
            }
            Ok(data) => {
                for (id, name, f) in conditional {
                    report(id, name, f(&data));
                }
                report("P", "full pipeline under 30 s", full_pipeline(&dir));
            }
        },
    }

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
