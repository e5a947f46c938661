//! `heatbound` command-line interface.
//!
//! Exit codes: 0 pass, 1 bound violation, 2 usage or configuration error,
//! 3 numerical tolerance failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heatbound::bounds::BoundQuery;
use heatbound::harness::{
    self, BoundKind, CompareOptions, Format, RowStatus, Sampling, SweepConfig, SPECTRUM_CACHE_ENV,
};
use heatbound::spectrum::neumann_inputs;
use heatbound::Error;

#[derive(Parser)]
#[command(name = "heatbound", version, about = "Boundary-independent heat kernel bounds and their verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Report format.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ThmArg {
    #[value(name = "11")]
    Thm11,
    #[value(name = "22")]
    Thm22,
    Dirichlet,
    VdbHull,
    VdbDiag,
    VdbOffdiag,
    Neumann41,
}

impl From<ThmArg> for BoundKind {
    fn from(t: ThmArg) -> Self {
        match t {
            ThmArg::Thm11 => BoundKind::Thm11,
            ThmArg::Thm22 => BoundKind::Thm22,
            ThmArg::Dirichlet => BoundKind::Dirichlet,
            ThmArg::VdbHull => BoundKind::VdbHull,
            ThmArg::VdbDiag => BoundKind::VdbDiag,
            ThmArg::VdbOffdiag => BoundKind::VdbOffdiag,
            ThmArg::Neumann41 => BoundKind::Neumann41,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the universal constants for a dimension.
    Constants {
        #[arg(long)]
        dim: u32,
        /// Green-function order (defaults to m_d).
        #[arg(long)]
        m: Option<u32>,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate one bound with its factor breakdown.
    Bound {
        #[arg(long, value_enum)]
        thm: ThmArg,
        #[arg(long)]
        dim: u32,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        rho_x: f64,
        #[arg(long)]
        rho_y: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        dist: f64,
        #[arg(long)]
        t: f64,
        /// Distance from the convex hull of {x, y} to the boundary (vdb-hull).
        #[arg(long)]
        delta: Option<f64>,
        /// Spectrum horizon for neumann41.
        #[arg(long, default_value_t = 4000.0)]
        lambda_max: f64,
        /// Bracket width allowed for the trace integral of neumann41.
        #[arg(long, default_value_t = 1e-2)]
        trace_tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Run a verification sweep described by a TOML file.
    Verify {
        config: PathBuf,
        /// Override the seed of a random sweep.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the diagonal boundary-independent bound with the convex-hull Dirichlet bound.
    Compare {
        #[arg(long)]
        dim: u32,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Smallest t/rho^2.
        #[arg(long, default_value_t = 1e-14)]
        t_min: f64,
        /// Largest t/rho^2.
        #[arg(long, default_value_t = 0.125)]
        t_max: f64,
        #[arg(long, default_value_t = 53)]
        points: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Print P_n and the sup-norms of its derivatives.
    CutoffTable {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Build (or load from $HEATBOUND_CACHE_DIR) the Neumann spectrum of the unit ball.
    Spectrum {
        #[arg(long)]
        dim: u32,
        #[arg(long, default_value_t = 4000.0)]
        lambda_max: f64,
        #[command(flatten)]
        output: Output,
    },
}

/// Failure of a command, mapped onto the exit codes.
enum Failure {
    Usage(String),
    Violation(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn emit(output: &Output, body: &str) -> Result<(), Failure> {
    match &output.out {
        Some(path) => fs::write(path, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}"))),
    }
}

fn format_of(output: &Output, default: Format) -> Format {
    output.format.map(Format::from).unwrap_or(default)
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(SPECTRUM_CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Constants { dim, m, output } => {
            let table = harness::constants_table(dim, m)?;
            let f = format_of(&output, Format::Csv);
            emit(&output, &table.render(f)?)
        }
        Command::Bound { thm, dim, m, rho_x, rho_y, dist, t, delta, lambda_max, trace_tol, output } => {
            let kind = BoundKind::from(thm);
            let rho_y = rho_y.unwrap_or(rho_x);
            let q = match m {
                Some(m) => BoundQuery::with_order(dim, m, rho_x, rho_y, dist, t)?,
                None => BoundQuery::new(dim, rho_x, rho_y, dist, t)?,
            };
            let trace = if kind == BoundKind::Neumann41 {
                let (table, _) = harness::load_or_build_spectrum(dim, lambda_max, cache_dir().as_deref())?;
                Some(neumann_inputs(&table, q.m, trace_tol)?)
            } else {
                None
            };
            let table = harness::bound_report(kind, &q, delta, trace.as_ref())?;
            let f = format_of(&output, Format::Csv);
            emit(&output, &table.render(f)?)
        }
        Command::Verify { config, seed, output } => verify(&config, seed, &output),
        Command::Compare { dim, rho, t_min, t_max, points, output } => {
            let report = harness::compare(&CompareOptions { d: dim, rho, t_min_fraction: t_min, t_max_fraction: t_max, points })?;
            let f = format_of(&output, Format::Csv);
            emit(&output, &report.table.render(f)?)?;
            match report.crossover {
                Some(c) => eprintln!("crossover at t/rho^2 = {}", harness::format_float(c)),
                None => eprintln!("no crossover in the tabulated range"),
            }
            eprintln!("boundary-independent bound below the hull bound somewhere: {}", report.improvement_found);
            Ok(())
        }
        Command::CutoffTable { n, output } => {
            let table = harness::cutoff_table(n)?;
            let f = format_of(&output, Format::Csv);
            emit(&output, &table.render(f)?)
        }
        Command::Spectrum { dim, lambda_max, output } => {
            let (table, cached) = harness::load_or_build_spectrum(dim, lambda_max, cache_dir().as_deref())?;
            eprintln!(
                "{} eigenvalues up to {lambda_max} ({})",
                table.count_below(lambda_max),
                if cached { "from cache" } else { "computed" }
            );
            let f = format_of(&output, Format::Csv);
            let body = match f {
                Format::Csv => {
                    let mut buf = Vec::new();
                    table.write_csv(&mut buf)?;
                    String::from_utf8(buf).map_err(|e| Failure::Usage(e.to_string()))?
                }
                Format::Json => {
                    let mut s = serde_json_string(&table)?;
                    s.push('\n');
                    s
                }
            };
            emit(&output, &body)
        }
    }
}

fn serde_json_string(table: &heatbound::spectrum::SpectrumTable) -> Result<String, Failure> {
    let mut t = harness::Table::new(["dimension", "lambda_max", "eigenvalue", "multiplicity"]);
    for e in table.entries() {
        t.push(vec![
            table.dimension().into(),
            table.lambda_max().into(),
            e.eigenvalue.into(),
            e.multiplicity.into(),
        ]);
    }
    let mut s = t.to_json()?;
    s.pop();
    Ok(s)
}

fn verify(path: &Path, seed: Option<u64>, output: &Output) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut config = SweepConfig::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    if let (Some(s), Sampling::Random { samples, .. }) = (seed, config.sampling) {
        config.sampling = Sampling::Random { samples, seed: s };
    }
    let report = harness::run_sweep(&config)?;
    let f = format_of(output, config.format);
    emit(output, &report.table.render(f)?)?;
    for line in report.summary.lines() {
        eprintln!("{line}");
    }
    match report.summary.status() {
        RowStatus::Pass => Ok(()),
        RowStatus::Violation => Err(Failure::Violation(format!("{} rows violate a bound", report.summary.violations))),
        RowStatus::Tolerance => Err(Failure::Numerical(format!(
            "{} rows exceed a bound by less than the kernel truncation error",
            report.summary.tolerance_failures
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
