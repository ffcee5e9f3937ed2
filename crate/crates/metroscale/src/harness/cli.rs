//! Command-line interface: `sweep`, `single`, `bounds`, `digits`, `check`.
//!
//! Exit codes: 0 success, 1 configuration/usage error, 2 numerical failure.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{bound_cc, bound_qc, bound_sequential};
use crate::harness::report::{emit_report, human_summary, OutputFormat};
use crate::harness::{checks, parse_strategy, run_sweep, GeneratorSpec, SweepConfig, DEFAULT_PHI};
use crate::protocols::{
    self, DigitEngine, GhzPath, OperatingPointPolicy, Protocol, StrategyConfig,
};

#[derive(Parser)]
#[command(
    name = "metroscale",
    version,
    about = "Phase-estimation strategy simulator: protocols, bounds, scaling sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep strategies over probe counts and emit a scaling report
    Sweep(SweepArgs),
    /// Run one estimation experiment and print its result
    Single(SingleArgs),
    /// Print the closed-form precision bounds for given N, nu, gap
    Bounds(BoundsArgs),
    /// Recover all digits of the phase with the staged protocol
    Digits(DigitsArgs),
    /// Run the invariant self-test suite
    Check(CheckArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// JSON config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated strategies (ramsey-cc, ghz-qc, sequential)
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    /// Comma-separated probe counts, strictly increasing
    #[arg(long = "N", alias = "n", value_delimiter = ',')]
    n_values: Option<Vec<u64>>,
    /// Repetitions per cell
    #[arg(long)]
    nu: Option<u64>,
    /// Pin the true phase (operating point moves to it)
    #[arg(long = "phi")]
    phi: Option<f64>,
    /// Generator preset: qubit-z or qutrit
    #[arg(long)]
    generator: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file path
    #[arg(long, default_value = "sweep-report.csv")]
    output: PathBuf,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct SingleArgs {
    /// ramsey-cc | ghz-qc | sequential (aliases: ramsey, cc, ghz, qc, seq)
    #[arg(long)]
    protocol: String,
    #[arg(long = "N", alias = "n")]
    n: u64,
    #[arg(long, default_value_t = 10_000)]
    nu: u64,
    #[arg(long = "phi")]
    phi: Option<f64>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "qubit-z")]
    generator: String,
    /// at-true-value | max-slope
    #[arg(long, default_value = "max-slope")]
    policy: String,
    /// auto | statevector | analytic (entangled protocol only)
    #[arg(long, default_value = "auto")]
    engine: String,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long = "N", alias = "n")]
    n: u64,
    #[arg(long)]
    nu: u64,
    #[arg(long)]
    gap: f64,
}

#[derive(Args)]
struct DigitsArgs {
    /// Numeral base b >= 2
    #[arg(long, default_value_t = 2)]
    base: u32,
    /// Number of digits (stages j = 0..digits-1, stage j spends b^j probes)
    #[arg(long)]
    digits: u32,
    /// Repetitions per digit
    #[arg(long, default_value_t = 400)]
    nu: u64,
    /// True phase (radians-equivalent); must satisfy phi * gap in [0, 2pi)
    #[arg(long = "phi", conflicts_with = "fraction")]
    phi: Option<f64>,
    /// True phase as the fraction phi * gap / 2pi in [0, 1)
    #[arg(long)]
    fraction: Option<f64>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// sequential | ghz
    #[arg(long, default_value = "sequential")]
    engine: String,
    #[arg(long, default_value = "qubit-z")]
    generator: String,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

/// Parse argv and dispatch; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Single(args) => cmd_single(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Digits(args) => cmd_digits(args),
        Command::Check(args) => cmd_check(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let mut cfg = match &args.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            serde_json::from_str::<SweepConfig>(&raw)
                .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?
        }
        None => SweepConfig::default(),
    };
    if let Some(strategies) = args.strategies {
        cfg.strategies = strategies;
    }
    if let Some(n_values) = args.n_values {
        cfg.n_values = n_values;
    }
    if let Some(nu) = args.nu {
        cfg.nu = nu;
    }
    if let Some(phi) = args.phi {
        cfg.phi_true = Some(phi);
    }
    if let Some(generator) = args.generator {
        cfg.generator = GeneratorSpec::from_name(&generator);
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let format: OutputFormat = args.format.parse()?;
    let report = run_sweep(&cfg)?;
    emit_report(&report, format, &args.output)?;
    print!("{}", human_summary(&report));
    println!("wrote {} report to {}", format, args.output.display());
    Ok(0)
}

#[derive(Serialize)]
struct SingleSummary {
    protocol: &'static str,
    n: u64,
    nu: u64,
    phi_true: f64,
    seed: u64,
    delta_phi_empirical: f64,
    mean_estimate: f64,
    theoretical_bound: f64,
    bound_ratio: f64,
    u_phi_applications: u64,
    signal_mean: f64,
    signal_variance: f64,
    signal_slope: f64,
    clipped_repetitions: usize,
}

fn cmd_single(args: SingleArgs) -> Result<i32> {
    let protocol = parse_strategy(&args.protocol)?;
    if protocol == Protocol::DigitByDigit {
        return Err(Error::Config(
            "use the digits subcommand for digit-by-digit runs".into(),
        ));
    }
    let generator = GeneratorSpec::from_name(&args.generator).build()?;
    let policy = parse_policy(&args.policy)?;
    let ghz_path = parse_engine(&args.engine)?;
    let phi = args.phi.unwrap_or(DEFAULT_PHI);
    let cfg = StrategyConfig::new(protocol, generator, args.n, args.nu, phi, args.seed)
        .with_policy(policy)
        .with_ghz_path(ghz_path);
    let result = protocols::run(&cfg)?;
    let summary = SingleSummary {
        protocol: protocol.label(),
        n: args.n,
        nu: args.nu,
        phi_true: phi,
        seed: args.seed,
        delta_phi_empirical: result.delta_phi_empirical,
        mean_estimate: result.mean_estimate,
        theoretical_bound: result.theoretical_bound,
        bound_ratio: result.bound_ratio(),
        u_phi_applications: result.u_phi_applications,
        signal_mean: result.signal_mean,
        signal_variance: result.signal_variance,
        signal_slope: result.signal_slope,
        clipped_repetitions: result.clipped_repetitions,
    };
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(0)
}

fn cmd_bounds(args: BoundsArgs) -> Result<i32> {
    if args.n == 0 || args.nu == 0 || args.gap <= 0.0 {
        return Err(Error::Config("N, nu and gap must all be positive".into()));
    }
    println!("precision bounds for N={} nu={} gap={}", args.n, args.nu, args.gap);
    println!("cc-cq      {}", bound_cc(args.n, args.nu, args.gap));
    println!("qc-qq      {}", bound_qc(args.n, args.nu, args.gap));
    println!("sequential {}", bound_sequential(args.n, args.nu, args.gap));
    Ok(0)
}

fn cmd_digits(args: DigitsArgs) -> Result<i32> {
    let generator = GeneratorSpec::from_name(&args.generator).build()?;
    if generator.gap_is_zero() {
        return Err(Error::ZeroGap);
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let phi = match (args.phi, args.fraction) {
        (Some(phi), _) => phi,
        (None, Some(fraction)) => fraction * two_pi / generator.gap(),
        (None, None) => 0.3789 * two_pi / generator.gap(),
    };
    let engine = match args.engine.trim().to_ascii_lowercase().as_str() {
        "sequential" | "seq" => DigitEngine::Sequential,
        "ghz" => DigitEngine::Ghz,
        other => return Err(Error::Config(format!("unknown digit engine '{other}'"))),
    };
    let cfg = StrategyConfig::new(
        Protocol::DigitByDigit,
        generator,
        1,
        args.nu,
        phi,
        args.seed,
    )
    .with_digits(args.base, args.digits)
    .with_digit_engine(engine);
    let result = protocols::run(&cfg)?;
    let report = result.digit_report.as_ref().expect("digit run carries a report");
    println!(
        "digit-by-digit recovery: base {} digits {} nu {} seed {}",
        report.base, args.digits, args.nu, args.seed
    );
    println!("digit  probes/rep  nu(cos)  nu(sin)  fraction   value  log10-margin");
    for stage in &report.stages {
        println!(
            "{:>5}  {:>10}  {:>7}  {:>7}  {:>8.5}  {:>5}  {:>12.2}",
            stage.index,
            stage.probes_per_repetition,
            stage.nu_cos,
            stage.nu_sin,
            stage.fraction_estimate,
            stage.digit,
            stage.log10_margin
        );
    }
    println!(
        "probes per batch: {} = ({}^{} - 1)/({} - 1)",
        report.probes_per_batch,
        report.base,
        args.digits,
        report.base
    );
    println!(
        "total phase applications: {} ({} per digit batch x nu {})",
        result.u_phi_applications, report.probes_per_batch, args.nu
    );
    println!(
        "assembled fraction: {:.10} (digits {:?})",
        report.assembled_fraction, report.digits
    );
    println!("assembled phi: {:.10}", report.assembled_phi);
    println!("estimated fraction std: {:.3e}", report.fraction_std);
    Ok(0)
}

fn cmd_check(args: CheckArgs) -> Result<i32> {
    let outcomes = checks::run_all(args.seed)?;
    let mut all_passed = true;
    for o in &outcomes {
        println!(
            "{:<28} {}  {}",
            o.name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        all_passed &= o.passed;
    }
    Ok(if all_passed { 0 } else { 2 })
}

fn parse_policy(raw: &str) -> Result<OperatingPointPolicy> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "at-true-value" | "at-true" => Ok(OperatingPointPolicy::AtTrueValue),
        "max-slope" | "quadrature" => Ok(OperatingPointPolicy::MaxSlope),
        other => Err(Error::Config(format!("unknown operating-point policy '{other}'"))),
    }
}

fn parse_engine(raw: &str) -> Result<GhzPath> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "auto" => Ok(GhzPath::Auto),
        "statevector" | "sv" => Ok(GhzPath::Statevector),
        "analytic" | "fast" => Ok(GhzPath::Analytic),
        other => Err(Error::Config(format!("unknown engine '{other}'"))),
    }
}
