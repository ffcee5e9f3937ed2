//! Experiment driver: generator presets, sweep configs, scaling-exponent
//! fits, and machine-readable reports. Everything here is `f64`-concrete;
//! the generic core sits underneath.

pub mod checks;
pub mod cli;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genspec::Generator;
use crate::protocols::{self, OperatingPointPolicy, Protocol, StrategyConfig};
use crate::qcore::{mix_seed, ComplexMatrix};

pub use report::{emit_report, OutputFormat, ScalingReport};

/// Default true phase used when a sweep does not pin one. Under the default
/// `MaxSlope` policy any value works; this one is arbitrary but fixed.
pub const DEFAULT_PHI: f64 = 0.4;

/// Generator selection: a named preset or an explicit Hermitian matrix.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Preset(String),
    Custom {
        dim: usize,
        re: Vec<f64>,
        im: Vec<f64>,
    },
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec::Preset("qubit-z".into())
    }
}

impl GeneratorSpec {
    pub fn from_name(name: &str) -> Self {
        GeneratorSpec::Preset(name.to_string())
    }

    pub fn build(&self) -> Result<Generator<f64>> {
        match self {
            GeneratorSpec::Preset(name) => match name.as_str() {
                "qubit-z" => Generator::new(ComplexMatrix::diagonal(&[-0.5, 0.5])),
                "qutrit" => Generator::new(ComplexMatrix::diagonal(&[0.0, 1.0, 2.0])),
                other => Err(Error::Config(format!(
                    "unknown generator preset '{other}' (expected qubit-z or qutrit)"
                ))),
            },
            GeneratorSpec::Custom { dim, re, im } => {
                if re.len() != dim * dim || im.len() != dim * dim {
                    return Err(Error::Config(format!(
                        "custom generator needs {} re/im entries, got {}/{}",
                        dim * dim,
                        re.len(),
                        im.len()
                    )));
                }
                let entries = re
                    .iter()
                    .zip(im)
                    .map(|(&r, &i)| num_complex::Complex::new(r, i))
                    .collect();
                let matrix = ComplexMatrix::from_entries(*dim, entries)?;
                // Generator::new rejects non-Hermitian input
                Generator::new(matrix)
            }
        }
    }
}

fn parse_strategy(name: &str) -> Result<Protocol> {
    match name.trim().to_ascii_lowercase().as_str() {
        "ramsey" | "ramsey-cc" | "cc" => Ok(Protocol::RamseyCC),
        "ghz" | "ghz-qc" | "qc" => Ok(Protocol::GhzQC),
        "sequential" | "seq" => Ok(Protocol::Sequential),
        "digits" | "digit-by-digit" => Ok(Protocol::DigitByDigit),
        other => Err(Error::Config(format!("unknown strategy '{other}'"))),
    }
}

/// A sweep over strategies and probe counts at fixed repetitions.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SweepConfig {
    pub strategies: Vec<String>,
    pub n_values: Vec<u64>,
    pub nu: u64,
    /// Fixed true phase; when absent each cell uses [`DEFAULT_PHI`] at the
    /// quadrature operating point.
    #[serde(default)]
    pub phi_true: Option<f64>,
    #[serde(default)]
    pub generator: GeneratorSpec,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            strategies: vec!["ramsey-cc".into(), "ghz-qc".into(), "sequential".into()],
            n_values: vec![4, 8, 16, 32, 64],
            nu: 10_000,
            phi_true: None,
            generator: GeneratorSpec::default(),
            seed: 7,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<Vec<Protocol>> {
        if self.strategies.is_empty() {
            return Err(Error::Config("sweep needs at least one strategy".into()));
        }
        let mut protocols = Vec::new();
        for name in &self.strategies {
            let p = parse_strategy(name)?;
            if p == Protocol::DigitByDigit {
                return Err(Error::Config(
                    "digit-by-digit runs through the `digits` subcommand, not sweeps".into(),
                ));
            }
            if !protocols.contains(&p) {
                protocols.push(p);
            }
        }
        if self.n_values.len() < 3 {
            return Err(Error::Config(
                "scaling fits need at least 3 probe counts".into(),
            ));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("N values must be strictly increasing".into()));
        }
        if self.nu < 2 {
            return Err(Error::Config("nu must be at least 2".into()));
        }
        Ok(protocols)
    }
}

/// One (strategy, N) sweep cell.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CellRecord {
    pub strategy: String,
    pub n: u64,
    pub nu: u64,
    pub delta_phi: Option<f64>,
    pub bound: f64,
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Fitted log-log scaling exponent for one strategy.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FitRecord {
    pub strategy: String,
    pub exponent: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub points: usize,
}

/// Ordinary least squares on `(ln N, ln delta_phi)`.
///
/// Returns `(slope, intercept, stderr_of_slope, residual_rms)`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<(f64, f64, f64, f64)> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit {
            reason: format!("need >= 3 points, got {}", points.len()),
        });
    }
    if points.iter().any(|&(n, d)| n <= 0.0 || d <= 0.0) {
        return Err(Error::DegenerateFit {
            reason: "all points must be positive".into(),
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit {
            reason: "all N values coincide".into(),
        });
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let dof = (points.len() - 2) as f64;
    let stderr = if dof > 0.0 { (rss / dof / sxx).sqrt() } else { 0.0 };
    let residual_rms = (rss / n).sqrt();
    Ok((slope, intercept, stderr, residual_rms))
}

/// Run every (strategy, N) cell of a sweep and fit the scaling exponents.
///
/// Cells run in canonical order (strategy, then ascending N), each with a
/// seed derived from the root seed and its cell index, so the report is
/// independent of scheduling. A failing cell is recorded and skipped; the
/// report is flagged partial.
pub fn run_sweep(cfg: &SweepConfig) -> Result<ScalingReport> {
    let protocols = cfg.validate()?;
    let generator = cfg.generator.build()?;
    if generator.gap_is_zero() {
        return Err(Error::ZeroGap);
    }
    let mut cells = Vec::new();
    let mut partial = false;
    for (strat_idx, &protocol) in protocols.iter().enumerate() {
        for (n_idx, &n) in cfg.n_values.iter().enumerate() {
            let cell_index = (strat_idx * cfg.n_values.len() + n_idx) as u64;
            let cell_seed = mix_seed(cfg.seed, cell_index);
            let phi = cfg.phi_true.unwrap_or(DEFAULT_PHI);
            let policy = if cfg.phi_true.is_some() {
                OperatingPointPolicy::AtTrueValue
            } else {
                OperatingPointPolicy::MaxSlope
            };
            let run_cfg = StrategyConfig::new(protocol, generator.clone(), n, cfg.nu, phi, cell_seed)
                .with_policy(policy);
            let bound = match protocol {
                Protocol::RamseyCC => crate::estimation::bound_cc(n, cfg.nu, generator.gap()),
                _ => crate::estimation::bound_qc(n, cfg.nu, generator.gap()),
            };
            match protocols::run(&run_cfg) {
                Ok(result) => cells.push(CellRecord {
                    strategy: protocol.label().to_string(),
                    n,
                    nu: cfg.nu,
                    delta_phi: Some(result.delta_phi_empirical),
                    bound,
                    ratio: Some(result.delta_phi_empirical / bound),
                    error: None,
                }),
                Err(err) => {
                    partial = true;
                    cells.push(CellRecord {
                        strategy: protocol.label().to_string(),
                        n,
                        nu: cfg.nu,
                        delta_phi: None,
                        bound,
                        ratio: None,
                        error: Some(err.to_string()),
                    });
                }
            }
        }
    }

    let mut fits = Vec::new();
    for protocol in &protocols {
        let points: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.strategy == protocol.label())
            .filter_map(|c| c.delta_phi.map(|d| (c.n as f64, d)))
            .collect();
        match fit_exponent(&points) {
            Ok((slope, intercept, stderr, residual_rms)) => fits.push(FitRecord {
                strategy: protocol.label().to_string(),
                exponent: slope,
                stderr,
                intercept,
                residual_rms,
                points: points.len(),
            }),
            Err(_) => partial = true,
        }
    }
    Ok(ScalingReport {
        config: cfg.clone(),
        cells,
        fits,
        partial,
    })
}
