use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use progsize::defects::{alberg_curve, concentration_table, fit_defect_weibull, DefectError};
use progsize::estimate::{
    estimate_count_in_range, estimate_total_size, estimate_total_size_corpus_rule,
    expected_count_in_range, expected_program_size, CorpusDefaults, EstimateError,
};
use progsize::fit::{fit_lognormal_mle, fit_quality_cdf, FitError, LognormalParams};
use progsize::ingest::eclipse::import_eclipse_file;
use progsize::ingest::{parse_canonical_csv, write_canonical_csv, Dataset, DefectKind};
use progsize::loc::{scan_tree, ProfileSet, ScanOptions};
use progsize::plot::{emit_alberg, emit_cdf, emit_rank_size};
use progsize::report::{build_report, emit_report, ReportFormat, ReportOptions};
use progsize::stats::{describe, share_above, share_below};

#[derive(Parser)]
#[command(name = "progsize", version, about = "Program-size statistics for source code bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count LOC per source file and write canonical records.
    Scan(ScanArgs),
    /// Descriptive statistics of program sizes.
    Stats(InputArgs),
    /// Lognormal maximum-likelihood fit of program sizes.
    Fit(FitArgs),
    /// Expected total size of a system with N programs.
    EstimateSize(EstimateSizeArgs),
    /// Expected number of programs with size in [x1, x2].
    EstimateRange(EstimateRangeArgs),
    /// Defect concentration in the largest programs.
    Defects(DefectsArgs),
    /// Full analysis report.
    Report(ReportArgs),
}

#[derive(Args)]
struct ScanArgs {
    /// Root directory to scan.
    dir: PathBuf,
    /// Only files matching this glob (relative to the root; repeatable).
    #[arg(long)]
    include: Vec<String>,
    /// Skip files matching this glob (repeatable).
    #[arg(long)]
    exclude: Vec<String>,
    /// Count every matched file with this language profile.
    #[arg(long)]
    lang: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Output CSV (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct InputArgs {
    /// Records CSV (canonical schema, or the Eclipse export with --eclipse).
    records: PathBuf,
    /// Read the Eclipse defect-data export format.
    #[arg(long)]
    eclipse: bool,
    /// Version label recorded with the dataset.
    #[arg(long, default_value = "")]
    label: String,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Write parameters and fit quality as JSON.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Write rank-size and CDF plot data to this directory.
    #[arg(long)]
    plots: Option<PathBuf>,
}

#[derive(Args)]
struct ModelArgs {
    /// Lognormal mu (default: corpus value).
    #[arg(long, requires = "sigma", allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Lognormal sigma (default: corpus value).
    #[arg(long, requires = "mu")]
    sigma: Option<f64>,
}

impl ModelArgs {
    fn params(&self) -> Result<Option<LognormalParams>, Failure> {
        match (self.mu, self.sigma) {
            (Some(mu), Some(sigma)) => LognormalParams::new(mu, sigma)
                .map(Some)
                .map_err(|e| Failure::input(anyhow!("--mu/--sigma: {e}"))),
            _ => Ok(None),
        }
    }
}

#[derive(Args)]
struct EstimateSizeArgs {
    /// Number of programs.
    #[arg(long)]
    n: u64,
    #[command(flatten)]
    model: ModelArgs,
    /// True total size, to report the relative error.
    #[arg(long)]
    actual: Option<f64>,
}

#[derive(Args)]
struct EstimateRangeArgs {
    /// Number of programs.
    #[arg(long)]
    n: u64,
    #[arg(long)]
    x1: f64,
    #[arg(long)]
    x2: f64,
    #[command(flatten)]
    model: ModelArgs,
    /// True count, to report the relative error.
    #[arg(long)]
    actual: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Pre,
    Post,
}

impl From<KindArg> for DefectKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Pre => DefectKind::Pre,
            KindArg::Post => DefectKind::Post,
        }
    }
}

#[derive(Args)]
struct DefectsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Top percentages of the largest programs.
    #[arg(long, value_delimiter = ',', default_values_t = [5.0, 10.0, 15.0, 20.0, 25.0])]
    top: Vec<f64>,
    /// Fit a Weibull CDF to the cumulative defect curve.
    #[arg(long)]
    fit_weibull: bool,
    /// Report a non-converged fit as a warning instead of failing.
    #[arg(long)]
    allow_warn: bool,
    /// Write the curve as CSV and SVG to this directory.
    #[arg(long)]
    plots: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output file (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Also write all plot data to this directory.
    #[arg(long)]
    plots: Option<PathBuf>,
    /// Pin the report timestamp (seconds since the Unix epoch).
    #[arg(long, conflicts_with = "no_timestamp")]
    timestamp: Option<u64>,
    /// Omit the timestamp.
    #[arg(long)]
    no_timestamp: bool,
    /// Accept non-converged or failed Weibull fits.
    #[arg(long)]
    allow_warn: bool,
}

/// A failed command and the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn input(error: anyhow::Error) -> Self {
        Self { code: 1, error }
    }

    fn numeric(error: anyhow::Error) -> Self {
        Self { code: 2, error }
    }
}

fn fit_failure(e: FitError) -> Failure {
    match e {
        FitError::EmptySample
        | FitError::DegenerateSample(_)
        | FitError::TooFewPoints { .. }
        | FitError::InvalidPoints(_) => Failure::input(e.into()),
        _ => Failure::numeric(e.into()),
    }
}

fn defect_failure(e: DefectError) -> Failure {
    match e {
        DefectError::Fit(f) => fit_failure(f),
        other => Failure::input(other.into()),
    }
}

fn estimate_failure(e: EstimateError) -> Failure {
    Failure::input(e.into())
}

macro_rules! input_err {
    ($e:expr) => {
        $e.map_err(|e| Failure::input(anyhow::Error::from(e)))
    };
}

fn load(args: &InputArgs) -> Result<Dataset, Failure> {
    let name = args
        .records
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    if args.eclipse {
        return import_eclipse_file(&args.records, &args.label)
            .with_context(|| args.records.display().to_string())
            .map_err(Failure::input);
    }
    let bytes = fs::read(&args.records)
        .with_context(|| format!("cannot read {}", args.records.display()))
        .map_err(Failure::input)?;
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return input_err!(Dataset::new(name, args.label.clone(), Vec::new()));
    }
    parse_canonical_csv(bytes.as_slice(), &name, &args.label)
        .with_context(|| args.records.display().to_string())
        .map_err(Failure::input)
}

fn output_writer(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .with_context(|| format!("cannot create {}", p.display()))
                .map_err(Failure::input)?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

fn run_scan(a: ScanArgs) -> Result<(), Failure> {
    let opts = ScanOptions {
        include: a.include,
        exclude: a.exclude,
        language: a.lang,
        threads: a.threads,
    };
    let outcome = input_err!(scan_tree(&a.dir, &opts, &ProfileSet::builtin()))?;
    for issue in &outcome.issues {
        eprintln!("warning: {}: {}", issue.path, issue.error);
    }
    let name = a
        .dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let dataset = input_err!(Dataset::new(name, "", outcome.records))?;
    let mut w = output_writer(a.output.as_deref())?;
    input_err!(write_canonical_csv(&dataset, &mut w))?;
    input_err!(w.flush())?;
    eprintln!(
        "{} files, {} LOC, {} without code, {} skipped",
        dataset.len(),
        dataset.total_loc(),
        outcome.empty_files.len(),
        outcome.issues.len()
    );
    Ok(())
}

fn run_stats(a: InputArgs) -> Result<(), Failure> {
    let ds = load(&a)?;
    let sizes = ds.sizes();
    let d = input_err!(describe(&sizes))?;
    println!("programs   {}", d.n);
    println!("total LOC  {}", ds.total_loc());
    println!("min        {}", d.min);
    println!("median     {}", d.median);
    println!("max        {}", d.max);
    println!("mode       {}", d.mode);
    println!("mean       {:.2}", d.mean);
    println!("std dev    {:.2}", d.std_dev);
    for t in [32, 64] {
        println!("< {t} LOC   {}", pct(input_err!(share_below(&sizes, t))?));
    }
    for t in [512, 1024] {
        println!("> {t} LOC {}", pct(input_err!(share_above(&sizes, t))?));
    }
    Ok(())
}

fn run_fit(a: FitArgs) -> Result<(), Failure> {
    let ds = load(&a.input)?;
    let sizes = ds.sizes();
    if sizes.is_empty() {
        return Err(fit_failure(FitError::EmptySample));
    }
    let as_f64: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    let params = fit_lognormal_mle(&as_f64).map_err(fit_failure)?;
    let quality = fit_quality_cdf(&sizes, &params).map_err(fit_failure)?;
    println!("mu     {:.4}", params.mu);
    println!("sigma  {:.4}", params.sigma);
    println!("R2     {:.4}", quality.r_squared);
    println!("Se     {:.4}", quality.se);
    println!("points {}", quality.n_points);
    if let Some(path) = &a.params {
        let doc = serde_json::json!({ "params": params, "quality": quality });
        let text = input_err!(serde_json::to_string_pretty(&doc))? + "\n";
        input_err!(fs::write(path, text))?;
    }
    if let Some(dir) = &a.plots {
        input_err!(emit_rank_size(&sizes, dir))?;
        input_err!(emit_cdf(&sizes, Some(&params), dir))?;
    }
    Ok(())
}

fn run_estimate_size(a: EstimateSizeArgs) -> Result<(), Failure> {
    let custom = a.model.params()?;
    let (per_program, result) = match &custom {
        Some(p) => (
            expected_program_size(p),
            estimate_total_size(a.n, p).map_err(estimate_failure)?,
        ),
        None => (
            CorpusDefaults::rule_constant(),
            estimate_total_size_corpus_rule(a.n).map_err(estimate_failure)?,
        ),
    };
    let result = match a.actual {
        Some(actual) => result.with_actual(actual).map_err(estimate_failure)?,
        None => result,
    };
    println!("expected program size  {per_program:.2}");
    println!("estimated total size   {}", result.rounded);
    print_mre(&result);
    Ok(())
}

fn print_mre(r: &progsize::EstimationResult) {
    if let (Some(actual), Some(mre)) = (r.actual, r.mre) {
        println!("actual                 {actual}");
        println!(
            "MRE                    {} ({})",
            pct(mre),
            if r.acceptable == Some(true) { "acceptable" } else { "not acceptable" }
        );
    }
}

fn run_estimate_range(a: EstimateRangeArgs) -> Result<(), Failure> {
    let p = a.model.params()?.unwrap_or_else(CorpusDefaults::params);
    let exact = expected_count_in_range(a.n, a.x1, a.x2, &p).map_err(estimate_failure)?;
    let result = estimate_count_in_range(a.n, a.x1, a.x2, &p).map_err(estimate_failure)?;
    let result = match a.actual {
        Some(actual) => result.with_actual_count(actual).map_err(estimate_failure)?,
        None => result,
    };
    for x in [a.x1, a.x2] {
        println!("{:<22} {:.4}", format!("F({x})"), p.cdf(x));
    }
    println!("expected count         {exact:.4}");
    println!("estimated programs     {}", result.rounded);
    print_mre(&result);
    Ok(())
}

fn run_defects(a: DefectsArgs) -> Result<(), Failure> {
    let ds = load(&a.input)?;
    let kind = DefectKind::from(a.kind);
    let table = concentration_table(&ds, kind, &a.top).map_err(defect_failure)?;
    let curve = alberg_curve(&ds, kind).map_err(defect_failure)?;
    println!("{kind}-release defects: {}", curve.total_defects);
    println!("top %   programs  defect share");
    for row in &table.rows {
        println!(
            "{:<7} {:>8}  {:>8}{}",
            format!("{}", row.top_percent),
            row.programs,
            pct(row.defect_share),
            if row.tie_straddles_cut { "  (tie at cut)" } else { "" }
        );
    }
    let mut model = None;
    if a.fit_weibull {
        let fit = fit_defect_weibull(&curve).map_err(defect_failure)?;
        println!("gamma   {:.4}", fit.params.gamma);
        println!("beta    {:.4}", fit.params.beta);
        println!("R2      {:.4}", fit.quality.r_squared);
        println!("Se      {:.4}", fit.quality.se);
        if !fit.converged {
            let msg = format!("Weibull fit did not converge after {} iterations", fit.iterations);
            if !a.allow_warn {
                return Err(Failure::numeric(anyhow!(msg)));
            }
            eprintln!("warning: {msg}");
        }
        model = Some(fit.params);
    }
    if let Some(dir) = &a.plots {
        input_err!(emit_alberg(&curve, model.as_ref(), dir))?;
    }
    Ok(())
}

fn run_report(a: ReportArgs) -> Result<(), Failure> {
    let ds = load(&a.input)?;
    let generated_unix = if a.no_timestamp {
        None
    } else {
        a.timestamp.or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .ok()
                .map(|d| d.as_secs())
        })
    };
    let opts = ReportOptions {
        generated_unix,
        ..ReportOptions::default()
    };
    let report = build_report(&ds, &opts).map_err(|e| match e {
        progsize::report::ReportError::Fit(f) => fit_failure(f),
        progsize::report::ReportError::Defect(d) => defect_failure(d),
        other => Failure::input(other.into()),
    })?;
    for sec in &report.defects {
        let problem = match (&sec.weibull, &sec.weibull_error) {
            (_, Some(err)) => Some(format!("{} Weibull fit failed: {err}", sec.kind)),
            (Some(w), None) if !w.converged => Some(format!("{} Weibull fit did not converge", sec.kind)),
            _ => None,
        };
        if let Some(msg) = problem {
            if !a.allow_warn {
                return Err(Failure::numeric(anyhow!(msg)));
            }
            eprintln!("warning: {msg}");
        }
    }
    let format = match a.format {
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Csv => ReportFormat::Csv,
    };
    let doc = input_err!(emit_report(&report, format))?;
    let mut w = output_writer(a.output.as_deref())?;
    input_err!(w.write_all(doc.as_bytes()))?;
    input_err!(w.flush())?;

    if let Some(dir) = &a.plots {
        let sizes = ds.sizes();
        input_err!(emit_rank_size(&sizes, dir))?;
        input_err!(emit_cdf(&sizes, Some(&report.lognormal.params), dir))?;
        for sec in &report.defects {
            let curve = alberg_curve(&ds, sec.kind).map_err(defect_failure)?;
            input_err!(emit_alberg(&curve, sec.weibull.as_ref().map(|w| &w.params), dir))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Scan(a) => run_scan(a),
        Command::Stats(a) => run_stats(a),
        Command::Fit(a) => run_fit(a),
        Command::EstimateSize(a) => run_estimate_size(a),
        Command::EstimateRange(a) => run_estimate_range(a),
        Command::Defects(a) => run_defects(a),
        Command::Report(a) => run_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
