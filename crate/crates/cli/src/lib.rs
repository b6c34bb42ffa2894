//! Command-line front end for `relay-bounds`.
//!
//! Exit codes: 0 success, 1 numeric or write failure, 2 bad flags or
//! malformed input, 3 a verification margin out of tolerance.

pub mod channel_io;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relay_bounds::dmc_relay::{capacity_ub_cor2_with, DEFAULT_SEED};
use relay_bounds::gaussian_relay::{emit_fig1_curves, emit_fig2_curves, report};
use relay_bounds::rhc_verify::{run_suite, SuiteConfig, SuiteKind, TimeChoice};
use relay_bounds::{BddDensityAlpha, EntropyRate, GaussianRelayParams, OptimizerConfig, Tolerance};

pub use error::CliError;
pub use output::{format_float, Cell, Format, Table};

#[derive(Debug, Parser)]
#[command(name = "relay-bounds", version, about = "Capacity upper bounds for the symmetric primitive relay channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds for the Gaussian relay channel at one operating point.
    Gaussian(GaussianArgs),
    /// Bound for a discrete channel read from a CSV file.
    Dmc(DmcArgs),
    /// Comparison curves over a uniform grid.
    Curves(CurvesArgs),
    /// Randomized and enumerated checks of the underlying inequalities.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Display rates in bits instead of nats. Input flags stay in nats.
    #[arg(long)]
    pub bits: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GaussianArgs {
    /// Signal-to-noise ratio P/N.
    #[arg(long, value_parser = positive, conflicts_with_all = ["power", "noise"])]
    pub snr: Option<f64>,
    #[arg(long, value_parser = positive, requires = "noise")]
    pub power: Option<f64>,
    #[arg(long, value_parser = positive, requires = "power")]
    pub noise: Option<f64>,
    /// Relay link rate in nats.
    #[arg(long, value_parser = non_negative)]
    pub c0: f64,
    /// Absolute tolerance of the root and minimum searches, in nats.
    #[arg(long, value_parser = positive, default_value_t = Tolerance::default().abs_tol)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DmcArgs {
    /// CSV file with one row of output probabilities per input symbol.
    #[arg(long)]
    pub channel: PathBuf,
    /// Relay link rate in nats.
    #[arg(long, value_parser = non_negative)]
    pub c0: f64,
    /// Density bound to use instead of the one computed from the channel.
    #[arg(long, value_parser = at_least_one)]
    pub alpha: Option<f64>,
    /// Seed for the optimizer's random starting points.
    #[arg(long, env = "RELAY_BOUNDS_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Absolute tolerance of the root and minimum searches, in nats.
    #[arg(long, value_parser = positive, default_value_t = Tolerance::default().abs_tol)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(name = "1")]
    GapCurves,
    #[value(name = "2")]
    GaussianBounds,
}

#[derive(Debug, Clone, Args)]
pub struct CurvesArgs {
    /// 1: h2 against h1; 2: Gaussian bounds against C0.
    #[arg(long, value_enum)]
    pub figure: Figure,
    #[arg(long, value_parser = positive, default_value_t = 0.5)]
    pub snr: f64,
    #[arg(long = "c0-max", value_parser = positive, default_value_t = 0.27)]
    pub c0_max: f64,
    #[arg(long = "h1-max", value_parser = positive, default_value_t = 3.0)]
    pub h1_max: f64,
    /// Grid points including both endpoints.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..), default_value_t = 512)]
    pub points: u32,
    /// Absolute tolerance of the root and minimum searches, in nats.
    #[arg(long, value_parser = positive, default_value_t = Tolerance::default().abs_tol)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteSelection {
    All,
    Mossel,
    MosselLog,
    Jensen,
    BorellExp,
    Lemma4,
    Quantizer,
}

impl SuiteSelection {
    fn kinds(self) -> Vec<SuiteKind> {
        match self {
            SuiteSelection::All => SuiteKind::ALL.to_vec(),
            SuiteSelection::Mossel => vec![SuiteKind::Mossel],
            SuiteSelection::MosselLog => vec![SuiteKind::MosselLog],
            SuiteSelection::Jensen => vec![SuiteKind::Jensen],
            SuiteSelection::BorellExp => vec![SuiteKind::BorellExp],
            SuiteSelection::Lemma4 => vec![SuiteKind::Lemma4],
            SuiteSelection::Quantizer => vec![SuiteKind::Quantizer],
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Which check to run.
    #[arg(long, value_enum, default_value_t = SuiteSelection::All)]
    pub suite: SuiteSelection,
    /// Instances per suite; each suite has its own default.
    #[arg(long)]
    pub count: Option<usize>,
    /// Seed for the instance generator.
    #[arg(long, env = "RELAY_BOUNDS_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of product factors in the semigroup suites.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
    pub n: Option<u32>,
    /// Semigroup time: a number, `critical`, or `random`.
    #[arg(long, value_parser = parse_time, default_value = "random")]
    pub t: TimeChoice,
    /// Norm index on the input side, below 1; drawn per instance when omitted.
    #[arg(long, value_parser = below_one)]
    pub p: Option<f64>,
    /// Norm index on the output side, at most `p`; drawn per instance when omitted.
    #[arg(long, value_parser = below_one)]
    pub q: Option<f64>,
    /// JSON-lines report destination; standard output by default.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn number(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be finite, got {s}"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    number(s).and_then(|x| if x > 0.0 { Ok(x) } else { Err(format!("must be positive, got {s}")) })
}

fn non_negative(s: &str) -> Result<f64, String> {
    number(s).and_then(|x| if x >= 0.0 { Ok(x) } else { Err(format!("must be non-negative, got {s}")) })
}

fn at_least_one(s: &str) -> Result<f64, String> {
    number(s).and_then(|x| if x >= 1.0 { Ok(x) } else { Err(format!("must be at least 1, got {s}")) })
}

fn below_one(s: &str) -> Result<f64, String> {
    number(s).and_then(|x| if x < 1.0 { Ok(x) } else { Err(format!("must be below 1, got {s}")) })
}

fn parse_time(s: &str) -> Result<TimeChoice, String> {
    match s {
        "critical" => Ok(TimeChoice::Critical),
        "random" => Ok(TimeChoice::Random),
        _ => non_negative(s).map(TimeChoice::Fixed),
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    match execute(&cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Gaussian(a) => cmd_gaussian(a, stdout),
        Command::Dmc(a) => cmd_dmc(a, stdout, stderr),
        Command::Curves(a) => cmd_curves(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout, stderr),
    }
}

fn tolerance(abs_tol: f64) -> Result<Tolerance, CliError> {
    Tolerance::new(abs_tol, Tolerance::default().max_iter).map_err(|e| CliError::Usage(e.to_string()))
}

fn rate(nats: f64, bits: bool) -> Cell {
    Cell::Num(if bits { nats / std::f64::consts::LN_2 } else { nats })
}

fn with_sink<F>(path: Option<&PathBuf>, stdout: &mut dyn Write, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> Result<(), CliError>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(stdout),
    }
}

fn emit(table: &Table, out: &OutputArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    with_sink(out.output.as_ref(), stdout, |w| table.write(out.format, w))
}

pub fn cmd_gaussian(a: &GaussianArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let c0 = EntropyRate::new(a.c0)?;
    let params = match (a.snr, a.power, a.noise) {
        (Some(snr), None, None) => GaussianRelayParams::from_snr(snr, c0)?,
        (None, Some(p), Some(n)) => GaussianRelayParams::new(p, n, c0)?,
        _ => return Err(CliError::Usage("give either --snr or both --power and --noise".into())),
    };
    let r = report(&params, tolerance(a.tol)?)?;
    let b = a.out.bits;
    let mut table = Table::new(["snr", "c0", "cutset", "relaxed", "lemma2", "lemma3", "best"]);
    table.push(vec![
        params.snr().into(),
        rate(a.c0, b),
        rate(r.cutset.nats(), b),
        rate(r.relaxed_baseline.nats(), b),
        rate(r.lemma2_bound.nats(), b),
        rate(r.lemma3_bound.nats(), b),
        rate(r.best.nats(), b),
    ]);
    emit(&table, &a.out, stdout)
}

pub fn cmd_dmc(a: &DmcArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let w = channel_io::read_channel_file(&a.channel)?;
    let c0 = EntropyRate::new(a.c0)?;
    let alpha = a.alpha.map(BddDensityAlpha::new).transpose()?;
    let cfg = OptimizerConfig { seed: a.seed, ..OptimizerConfig::default() };
    let r = capacity_ub_cor2_with(&w, c0, alpha, tolerance(a.tol)?, &cfg)?;
    let b = a.out.bits;
    let mut columns: Vec<String> =
        ["alpha", "i_infinity", "c0", "penalty", "cutset", "cor2", "optimality_gap", "certified"]
            .map(String::from)
            .to_vec();
    columns.extend((0..w.inputs()).map(|x| format!("p{x}")));
    let mut row = vec![
        r.alpha.value().into(),
        rate(r.i_infinity.nats(), b),
        rate(a.c0, b),
        rate(r.penalty.nats(), b),
        rate(r.cutset.nats(), b),
        rate(r.cor2_bound.nats(), b),
        rate(r.optimality_gap, b),
        r.certified.into(),
    ];
    row.extend(r.argmax_input.probs().iter().map(|&p| Cell::Num(p)));
    let mut table = Table::new(columns);
    table.push(row);
    emit(&table, &a.out, stdout)?;
    if !r.certified {
        let _ = writeln!(stderr, "optimizer could not certify its maximum: optimality gap {}", r.optimality_gap);
        return Err(CliError::Numeric(relay_bounds::BoundsError::NonConvergence {
            iterations: cfg.max_iter,
            best: r.cor2_bound.nats(),
        }));
    }
    Ok(())
}

pub fn cmd_curves(a: &CurvesArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let tol = tolerance(a.tol)?;
    let n = a.points as usize;
    let curves = match a.figure {
        Figure::GapCurves => emit_fig1_curves(EntropyRate::new(a.h1_max)?, n, tol)?,
        Figure::GaussianBounds => emit_fig2_curves(a.snr, EntropyRate::new(a.c0_max)?, n, tol)?,
    };
    let mut table = Table::new(curves.columns.iter().copied());
    for row in &curves.rows {
        table.push(row.iter().map(|&v| rate(v, a.out.bits)).collect());
    }
    emit(&table, &a.out, stdout)
}

pub fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    if let (Some(p), Some(q)) = (a.p, a.q) {
        if q > p {
            return Err(CliError::Usage(format!("--q ({q}) must not exceed --p ({p})")));
        }
    }
    let mut failures = 0;
    with_sink(a.output.as_ref(), stdout, |sink| {
        for kind in a.suite.kinds() {
            let mut cfg = SuiteConfig::new(a.seed, a.count.unwrap_or_else(|| kind.default_count()));
            cfg.factors = a.n.map(|n| n as usize);
            cfg.time = a.t;
            cfg.p = a.p;
            cfg.q = a.q;
            let report = run_suite(kind, &cfg)?;
            for record in &report.records {
                let line = serde_json::to_string(record)?;
                writeln!(sink, "{line}")?;
                if !record.pass {
                    writeln!(stderr, "FAIL {line}")?;
                }
            }
            let failed = report.failures().count();
            writeln!(
                stderr,
                "{}: {} instances, min margin {}, {} failed",
                kind.name(),
                report.records.len(),
                format_float(report.min_margin()),
                failed
            )?;
            failures += failed;
        }
        Ok(())
    })?;
    if failures > 0 {
        return Err(CliError::VerifyFailed { failures });
    }
    Ok(())
}
