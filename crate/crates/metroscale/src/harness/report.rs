//! Report emission: canonical CSV, JSON, and a human-readable summary.
//!
//! CSV contract: UTF-8, LF line endings, header row exactly
//! `strategy,N,nu,delta_phi,bound,ratio`, floats with 17 significant digits
//! (bit-exact f64 round-trip). Failed cells are omitted from the CSV and
//! carried with their error text in the JSON report.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{CellRecord, FitRecord, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputFormat::Csv => write!(f, "csv"),
            OutputFormat::Json => write!(f, "json"),
        }
    }
}

/// Complete sweep outcome: the config that produced it, every cell, and the
/// per-strategy scaling fits.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScalingReport {
    pub config: SweepConfig,
    pub cells: Vec<CellRecord>,
    pub fits: Vec<FitRecord>,
    pub partial: bool,
}

/// 17 significant digits: enough for an exact f64 round-trip.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub const CSV_HEADER: &str = "strategy,N,nu,delta_phi,bound,ratio";

pub fn csv_string(report: &ScalingReport) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for cell in &report.cells {
        let (Some(delta), Some(ratio)) = (cell.delta_phi, cell.ratio) else {
            continue;
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            cell.strategy,
            cell.n,
            cell.nu,
            format_float(delta),
            format_float(cell.bound),
            format_float(ratio),
        ));
    }
    out
}

pub fn json_string(report: &ScalingReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_json(raw: &str) -> Result<ScalingReport> {
    Ok(serde_json::from_str(raw)?)
}

/// Write the machine-readable table for the chosen format.
pub fn emit_report(report: &ScalingReport, format: OutputFormat, path: &Path) -> Result<()> {
    if report.cells.is_empty() {
        return Err(Error::InvalidInput("refusing to emit an empty report".into()));
    }
    let body = match format {
        OutputFormat::Csv => csv_string(report),
        OutputFormat::Json => json_string(report)?,
    };
    std::fs::write(path, body)?;
    Ok(())
}

/// Human-readable summary with bound-saturation ratios.
pub fn human_summary(report: &ScalingReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "sweep: nu={} seed={} strategies={}\n",
        report.config.nu,
        report.config.seed,
        report.config.strategies.join(",")
    ));
    out.push_str("strategy       N      delta_phi      bound          ratio\n");
    for cell in &report.cells {
        match (cell.delta_phi, cell.ratio) {
            (Some(d), Some(r)) => out.push_str(&format!(
                "{:<12} {:>6} {:>14.6e} {:>14.6e} {:>8.4}\n",
                cell.strategy, cell.n, d, cell.bound, r
            )),
            _ => out.push_str(&format!(
                "{:<12} {:>6} failed: {}\n",
                cell.strategy,
                cell.n,
                cell.error.as_deref().unwrap_or("unknown")
            )),
        }
    }
    for fit in &report.fits {
        out.push_str(&format!(
            "fit {:<12} exponent {:+.4} +- {:.4} (residual rms {:.2e}, {} points)\n",
            fit.strategy, fit.exponent, fit.stderr, fit.residual_rms, fit.points
        ));
    }
    if report.partial {
        out.push_str("warning: report is partial; one or more cells failed\n");
    }
    out
}
