//! `dht`: apply discrete Hilbert-family operators to CSV sequences, run
//! property-check suites, and estimate operator norms.
//!
//! Exit codes: 0 success, 1 a check ran and failed, 2 usage error, 3 I/O or
//! file-format error, 4 numerical/parameter error.

mod analyze;
mod apply;
mod checks;
mod defaults;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use dht_core::ops::OperatorSpec;
use dht_core::Error;

#[derive(Parser)]
#[command(
    name = "dht",
    version,
    about = "Discrete Hilbert transform toolkit: the operators H, H_d, T_t, K, Ktilde, U_t \
             on bi-infinite sequences — application, property checks, norm estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one operator to a CSV sequence and write the result as CSV
    Apply(ApplyArgs),
    /// Run a property-check suite; one JSON report per trial plus a summary
    Check(CheckArgs),
    /// Norm estimates, the n_p constant, and direct-vs-fft benchmarks
    Analyze(AnalyzeCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OpName {
    #[value(name = "H")]
    H,
    #[value(name = "Hd")]
    Hd,
    #[value(name = "Tt")]
    Tt,
    #[value(name = "K")]
    K,
    #[value(name = "Ktilde")]
    Ktilde,
    #[value(name = "Ut")]
    Ut,
    #[value(name = "exp-series")]
    ExpSeries,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodName {
    Direct,
    Fft,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PropertyName {
    GroupLaw,
    Isometry,
    Adjoint,
    Generator,
    StrongContinuity,
    KakInvolution,
    UtNorm,
    Resolvent,
    Identities,
    Ordering,
}

impl PropertyName {
    fn as_str(self) -> &'static str {
        match self {
            PropertyName::GroupLaw => "group-law",
            PropertyName::Isometry => "isometry",
            PropertyName::Adjoint => "adjoint",
            PropertyName::Generator => "generator",
            PropertyName::StrongContinuity => "strong-continuity",
            PropertyName::KakInvolution => "kak-involution",
            PropertyName::UtNorm => "ut-norm",
            PropertyName::Resolvent => "resolvent",
            PropertyName::Identities => "identities",
            PropertyName::Ordering => "ordering",
        }
    }
}

/// Shared operator-parameter flags (`--t`, `--d`, `--s`, `--terms`).
#[derive(Args, Debug, Clone, Copy)]
struct OpParams {
    /// Time parameter for Tt / Ut
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Shift parameter for Hd, in (-1, 1)
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    /// Time parameter for exp-series
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    /// Series length for exp-series
    #[arg(long)]
    terms: Option<u32>,
}

#[derive(Args)]
struct ApplyArgs {
    /// Operator to apply
    #[arg(long, value_enum, ignore_case = true)]
    op: OpName,
    #[command(flatten)]
    params: OpParams,
    /// Input sequence (CSV: index,re,im)
    #[arg(long)]
    input: PathBuf,
    /// Output window as lo:hi (default: the input's support)
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<(i64, i64)>,
    /// Application path
    #[arg(long, value_enum, default_value = "direct", ignore_case = true)]
    method: MethodName,
    /// Output CSV path
    #[arg(long)]
    output: PathBuf,
    /// Print a one-line summary to stdout
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// Property suite to run
    #[arg(long, value_enum, required_unless_present = "print_defaults")]
    property: Option<PropertyName>,
    /// Print the versioned defaults table as JSON and exit
    #[arg(long)]
    print_defaults: bool,
    /// Base RNG seed; trial i draws from substream i
    #[arg(long)]
    seed: Option<u64>,
    /// Number of trials (default from the defaults table)
    #[arg(long)]
    trials: Option<usize>,
    /// Truncation half-width override
    #[arg(long = "M", allow_negative_numbers = true)]
    m: Option<i64>,
    /// Window half-width override
    #[arg(long = "W", allow_negative_numbers = true)]
    w: Option<i64>,
    #[command(flatten)]
    params: OpParams,
    /// Resolvent spectral parameter (> 0)
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Norm index for ordering (1 < p < inf)
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
}

#[derive(Args)]
struct AnalyzeCmd {
    #[command(subcommand)]
    sub: AnalyzeSub,
}

#[derive(Subcommand)]
enum AnalyzeSub {
    /// Estimate the l^p -> l^p norm of a truncated operator (JSON)
    Norm(NormArgs),
    /// Print the constant n_p = max(tan(pi/2p), cot(pi/2p)) (JSON)
    Np(NpArgs),
    /// Time direct vs fft application on seeded inputs (JSON records)
    Bench(BenchArgs),
}

#[derive(Args)]
struct NormArgs {
    #[arg(long, value_enum, ignore_case = true)]
    op: OpName,
    #[command(flatten)]
    params: OpParams,
    /// Norm index (p = 2 uses power iteration; otherwise Boyd iteration)
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    p: f64,
    /// Truncation half-width
    #[arg(long = "M", default_value_t = 200, allow_negative_numbers = true)]
    m: i64,
    /// Iteration budget (default: 300 for p = 2, else 600)
    #[arg(long)]
    iters: Option<u32>,
    /// Random restarts for the Boyd iteration (default 8; ignored at p = 2)
    #[arg(long)]
    restarts: Option<u32>,
}

#[derive(Args)]
struct NpArgs {
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, ignore_case = true)]
    op: OpName,
    #[command(flatten)]
    params: OpParams,
    /// Comma-separated input sizes
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Timing repeats per size (best-of)
    #[arg(long, default_value_t = 3)]
    repeats: u32,
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got '{s}'"))?;
    let lo = lo
        .trim()
        .parse::<i64>()
        .map_err(|e| format!("bad window lower bound '{lo}': {e}"))?;
    let hi = hi
        .trim()
        .parse::<i64>()
        .map_err(|e| format!("bad window upper bound '{hi}': {e}"))?;
    Ok((lo, hi))
}

/// Reports a missing/inconsistent flag combination as a usage error (exit 2).
fn usage_error(message: &str) -> ! {
    Cli::command()
        .error(clap::error::ErrorKind::MissingRequiredArgument, message)
        .exit()
}

/// Builds the operator description, demanding exactly the parameters the
/// chosen operator needs.
fn op_spec(op: OpName, params: &OpParams) -> OperatorSpec {
    match op {
        OpName::H => OperatorSpec::H,
        OpName::K => OperatorSpec::K,
        OpName::Ktilde => OperatorSpec::Ktilde,
        OpName::Hd => match params.d {
            Some(d) => OperatorSpec::Hd { d },
            None => usage_error("--op Hd requires --d"),
        },
        OpName::Tt => match params.t {
            Some(t) => OperatorSpec::Tt { t },
            None => usage_error("--op Tt requires --t"),
        },
        OpName::Ut => match params.t {
            Some(t) => OperatorSpec::Ut { t },
            None => usage_error("--op Ut requires --t"),
        },
        OpName::ExpSeries => match (params.s, params.terms) {
            (Some(s), Some(terms)) => OperatorSpec::ExpSeries { s, terms },
            _ => usage_error("--op exp-series requires --s and --terms"),
        },
    }
}

/// Optional `THREADS` environment override for parallel check trials.
fn threads_from_env() -> usize {
    match std::env::var("THREADS") {
        Err(_) => 1,
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => usage_error(&format!(
                "THREADS must be a positive integer, got '{raw}'"
            )),
        },
    }
}

fn run(cli: Cli) -> dht_core::Result<ExitCode> {
    match cli.command {
        Command::Apply(args) => {
            let spec = op_spec(args.op, &args.params);
            let method = match args.method {
                MethodName::Direct => apply::Method::Direct,
                MethodName::Fft => apply::Method::Fft,
            };
            apply::run(&apply::ApplyParams {
                spec,
                input: &args.input,
                window: args.window,
                method,
                output: &args.output,
                verbose: args.verbose,
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check(args) => {
            if args.print_defaults {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&defaults::table_json())
                        .expect("defaults serialize")
                );
                return Ok(ExitCode::SUCCESS);
            }
            let property = args
                .property
                .expect("clap enforces --property unless --print-defaults")
                .as_str();
            let opts = checks::CheckOptions {
                seed: args.seed.unwrap_or(defaults::DEFAULT_SEED),
                threads: threads_from_env(),
                trials: args.trials,
                m: args.m,
                w: args.w,
                t: args.params.t,
                s: args.params.s,
                d: args.params.d,
                lambda: args.lambda,
                p: args.p,
            };
            let reports = checks::run_property(property, &opts)?;
            for r in &reports {
                report::emit(r);
            }
            if reports.iter().all(|r| r.pass) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Analyze(cmd) => {
            match cmd.sub {
                AnalyzeSub::Norm(args) => {
                    let spec = op_spec(args.op, &args.params);
                    analyze::run_norm(&spec, args.p, args.m, args.iters, args.restarts)?;
                }
                AnalyzeSub::Np(args) => analyze::run_np(args.p)?,
                AnalyzeSub::Bench(args) => {
                    let spec = op_spec(args.op, &args.params);
                    analyze::run_bench(&spec, &args.sizes, args.repeats)?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Io(_) | Error::Format(_) => ExitCode::from(3),
                _ => ExitCode::from(4),
            }
        }
    }
}
