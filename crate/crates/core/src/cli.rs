//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num::Zero;
use rayon::prelude::*;

use crate::approx::approximation_sequence;
use crate::error::{Error, Result};
use crate::forward::Forward;
use crate::graph::GraphMeasure;
use crate::inverse::{validate_spectral_data, Inverse};
use crate::io;
use crate::number::{format_decimal, DEFAULT_DIGITS, Q};
use crate::oracle;
use crate::random::{random_measures, RandomConfig, PRNG_NAME};

pub const DIGITS_ENV: &str = "KREIN_STAR_DIGITS";

#[derive(Debug, Parser)]
#[command(name = "krein-star", version, about = "Spectral problems on star graphs of Stieltjes strings")]
pub struct Cli {
    /// Significant digits for decimal output; overrides KREIN_STAR_DIGITS.
    #[arg(long, global = true)]
    pub digits: Option<usize>,

    /// Worker threads for independent cases.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a measure or spectral document.
    Validate(ValidateArgs),
    /// Measure to spectral data.
    Forward(ForwardArgs),
    /// Spectral data to measure.
    Inverse(InverseArgs),
    /// Forward, serialize, parse, inverse and compare.
    Roundtrip(RoundtripArgs),
    /// Compare exact spectra with a floating-point eigensolver.
    Oracle(OracleArgs),
    /// Reconstruct from spectral data cut off at each cutoff.
    Truncate(TruncateArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, conflicts_with = "spectral", required_unless_present = "spectral")]
    pub measure: Option<PathBuf>,
    #[arg(long)]
    pub spectral: Option<PathBuf>,
    /// Relative tolerance for identifying eigenvalues that should coincide.
    #[arg(long)]
    pub match_tol: Option<String>,
}

#[derive(Debug, Args)]
pub struct ForwardArgs {
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV with trace residuals and invariant verdicts.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InverseArgs {
    #[arg(long)]
    pub spectral: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub match_tol: Option<String>,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    pub measure: Option<PathBuf>,
    /// Number of seeded random measures.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance for the decimal round trip.
    #[arg(long, default_value = "1e-8")]
    pub tol: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub measure: PathBuf,
    #[arg(long, default_value_t = oracle::DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TruncateArgs {
    #[arg(long)]
    pub measure: PathBuf,
    /// Comma-separated, increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    pub cutoffs: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Output precision: flag, then environment, then the default.
pub fn resolve_digits(flag: Option<usize>) -> Result<usize> {
    let d = match flag {
        Some(d) => d,
        None => match std::env::var(DIGITS_ENV) {
            Ok(s) => s.trim().parse().map_err(|_| Error::invalid(format!("{DIGITS_ENV}={s:?} is not a positive integer")))?,
            Err(_) => DEFAULT_DIGITS,
        },
    };
    if d == 0 {
        return Err(Error::invalid("digits must be at least 1"));
    }
    Ok(d)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io { path: p.display().to_string(), source }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io { path: "<stdout>".into(), source }),
    }
}

fn rational_arg(s: &str, name: &str) -> Result<Q> {
    io::parse_rational(s).ok_or_else(|| Error::invalid(format!("--{name}: not a number: {s}")))
}

fn match_tol(s: &Option<String>) -> Result<Option<Q>> {
    s.as_deref().map(|s| rational_arg(s, "match-tol")).transpose()
}

/// Outcome of one forward, serialize, parse, inverse cycle.
#[derive(Clone, Debug)]
pub struct RoundtripCase {
    pub edges: usize,
    pub masses: usize,
    pub central: bool,
    pub eigenvalues: usize,
    /// `solve(export(w)) = w` in exact arithmetic.
    pub exact: bool,
    /// The serialized spectral data parses back to the same values.
    pub lossless: bool,
    /// Largest relative deviation after the decimal round trip.
    pub deviation: Option<Q>,
}

impl RoundtripCase {
    pub fn passes(&self, tol: &Q) -> bool {
        self.exact && self.deviation.as_ref().is_some_and(|d| d < tol && (!self.lossless || d.is_zero()))
    }
}

pub fn roundtrip_case(measure: &GraphMeasure, digits: usize) -> Result<RoundtripCase> {
    let fwd = Forward::new(measure)?;
    let data = fwd.export();
    let exact = Inverse::new(&data)?.solve()? == *measure;
    let text = io::spectral_to_string(&data, digits);
    let parsed = io::spectral_from_str(&text, None)?;
    let lossless = parsed.same_as(&data);
    let back = Inverse::new(&parsed)?.solve()?;
    Ok(RoundtripCase {
        edges: measure.graph().len(),
        masses: measure.mass_count(),
        central: !measure.central_mass().is_zero(),
        eigenvalues: fwd.eigenvalue_count(),
        exact,
        lossless,
        deviation: io::measure_deviation(measure, &back),
    })
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn validate(args: &ValidateArgs, stdout: &mut dyn Write) -> Result<()> {
    if let Some(p) = &args.measure {
        let m = io::measure_from_str(&read(p)?)?;
        let report = Forward::new(&m)?.invariants();
        for (name, ok) in report.verdicts() {
            writeln!(stdout, "{name}: {}", if ok { "pass" } else { "fail" }).ok();
        }
        if !report.holds() {
            return Err(Error::invariant(format!("failed checks: {}", report.failures().join(", "))));
        }
        writeln!(stdout, "valid measure: {} masses, {} eigenvalues", m.mass_count(), report.count.0).ok();
    } else if let Some(p) = &args.spectral {
        let data = io::spectral_from_str(&read(p)?, match_tol(&args.match_tol)?.as_ref())?;
        validate_spectral_data(&data).map_err(Error::InvalidSpectralData)?;
        writeln!(stdout, "valid spectral data: {} eigenvalues with multiplicity", data.total_multiplicity()).ok();
    }
    Ok(())
}

fn forward(args: &ForwardArgs, digits: usize, stdout: &mut dyn Write) -> Result<()> {
    let m = io::measure_from_str(&read(&args.measure)?)?;
    let fwd = Forward::new(&m)?;
    let report = fwd.invariants();
    if let Some(p) = &args.report {
        emit(Some(p), &io::forward_report_csv(&fwd, &report, digits), stdout)?;
    }
    if !report.holds() {
        return Err(Error::invariant(format!("failed checks: {}", report.failures().join(", "))));
    }
    emit(args.out.as_deref(), &io::spectral_to_string(&fwd.export(), digits), stdout)
}

fn inverse(args: &InverseArgs, digits: usize, stdout: &mut dyn Write) -> Result<()> {
    let data = io::spectral_from_str(&read(&args.spectral)?, match_tol(&args.match_tol)?.as_ref())?;
    let m = Inverse::new(&data)?.solve()?;
    emit(args.out.as_deref(), &io::measure_to_string(&m, digits), stdout)
}

fn roundtrip(args: &RoundtripArgs, digits: usize, jobs: Option<usize>, stdout: &mut dyn Write) -> Result<()> {
    let tol = rational_arg(&args.tol, "tol")?;
    let (measures, comment) = match (&args.measure, args.random) {
        (Some(p), _) => (vec![io::measure_from_str(&read(p)?)?], format!("input={}", p.display())),
        (None, Some(n)) => (
            random_measures(args.seed, n, &RandomConfig::default()),
            format!("prng={PRNG_NAME} seed={} cases={n}", args.seed),
        ),
        (None, None) => return Err(Error::invalid("either --measure or --random is required")),
    };
    let cases: Vec<Result<RoundtripCase>> =
        with_pool(jobs, || measures.par_iter().map(|m| roundtrip_case(m, digits)).collect())?;
    let header: Vec<String> = ["case", "edges", "masses", "central_mass", "eigenvalues", "exact", "lossless", "max_relative_deviation", "verdict"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    let mut worst: Option<(usize, String)> = None;
    for (i, c) in cases.iter().enumerate() {
        match c {
            Ok(c) => {
                let dev = c.deviation.as_ref().map_or("structure".to_string(), |d| format_decimal(d, 6));
                let ok = c.passes(&tol);
                if !ok && worst.is_none() {
                    worst = Some((i, dev.clone()));
                }
                rows.push(vec![
                    i.to_string(),
                    c.edges.to_string(),
                    c.masses.to_string(),
                    c.central.to_string(),
                    c.eigenvalues.to_string(),
                    c.exact.to_string(),
                    c.lossless.to_string(),
                    dev,
                    if ok { "pass" } else { "fail" }.into(),
                ]);
            }
            Err(e) => {
                if worst.is_none() {
                    worst = Some((i, e.reason_code().to_string()));
                }
                let mut row = vec![i.to_string()];
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.push(e.reason_code().to_string());
                row.push("fail".into());
                rows.push(row);
            }
        }
    }
    emit(args.out.as_deref(), &io::csv_with_comment(&comment, &header, &rows), stdout)?;
    match worst {
        None => Ok(()),
        Some((i, dev)) => Err(Error::Deviation { deviation: format!("case {i}: {dev}"), tolerance: args.tol.clone() }),
    }
}

fn run_oracle(args: &OracleArgs, stdout: &mut dyn Write) -> Result<()> {
    let m = io::measure_from_str(&read(&args.measure)?)?;
    let report = oracle::compare(&m, args.tol)?;
    emit(args.out.as_deref(), &io::oracle_report_csv(&report, m.graph()), stdout)?;
    if !report.passed() {
        return Err(Error::Deviation { deviation: report.mismatches.join("; "), tolerance: args.tol.to_string() });
    }
    Ok(())
}

fn truncate(args: &TruncateArgs, digits: usize, jobs: Option<usize>, stdout: &mut dyn Write) -> Result<()> {
    let m = io::measure_from_str(&read(&args.measure)?)?;
    let cutoffs = args.cutoffs.iter().map(|c| rational_arg(c, "cutoffs")).collect::<Result<Vec<_>>>()?;
    let report = with_pool(jobs, || approximation_sequence(&m, &cutoffs))??;
    emit(args.out.as_deref(), &io::sequence_csv(&report, m.graph(), digits), stdout)?;
    let failures = report.failures();
    if !failures.is_empty() {
        return Err(Error::invariant(failures.join("; ")));
    }
    Ok(())
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let digits = resolve_digits(cli.digits)?;
    match &cli.command {
        Command::Validate(a) => validate(a, stdout),
        Command::Forward(a) => forward(a, digits, stdout),
        Command::Inverse(a) => inverse(a, digits, stdout),
        Command::Roundtrip(a) => roundtrip(a, digits, cli.jobs, stdout),
        Command::Oracle(a) => run_oracle(a, stdout),
        Command::Truncate(a) => truncate(a, digits, cli.jobs, stdout),
    }
}

/// Parses arguments, runs, reports errors as `error[code]: message`, and
/// returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            if e.use_stderr() {
                write!(stderr, "{}", e.render()).ok();
            } else {
                write!(stdout, "{}", e.render()).ok();
            }
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            writeln!(stderr, "error[{}]: {e}", e.reason_code()).ok();
            if let Error::InvalidSpectralData(vs) = &e {
                for v in vs {
                    writeln!(stderr, "  {}: {v}", v.code()).ok();
                }
            }
            e.exit_code()
        }
    }
}
