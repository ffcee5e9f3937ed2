//! Crate-wide error type. Variants mirror the failure modes of the
//! individual operations; the CLI maps them onto exit codes.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |H - H^dag| entry = {deviation:e} exceeds {tolerance:e}")]
    NonHermitian { deviation: f64, tolerance: f64 },

    #[error("eigendecomposition did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NumericalFailure { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: {left} vs {right} ({context})")]
    DimensionMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },

    #[error("operator is not unitary: max |U^dag U - I| entry = {deviation:e} exceeds {tolerance:e}")]
    NonUnitary { deviation: f64, tolerance: f64 },

    #[error("interleaved unitary #{index} fails the unitarity check (deviation {deviation:e})")]
    NonUnitaryInterleave { index: usize, deviation: f64 },

    #[error("generator has zero spectral gap; the phase is unobservable")]
    ZeroGap,

    #[error("register dimension {dim} exceeds the statevector cap {cap}")]
    DimensionTooLarge { dim: u128, cap: u128 },

    #[error("operating point is degenerate: |d<signal>/d phi| = {slope:e} below {threshold:e}")]
    DegenerateOperatingPoint { slope: f64, threshold: f64 },

    #[error("estimator slope too small: |slope| = {slope:e}")]
    ZeroSlope { slope: f64 },

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("signal derivative vanishes at the operating point (fringe node)")]
    ZeroDerivative,

    #[error("digit {digit} is ambiguous: top-two likelihood ratio {ratio:.3} below 10")]
    DigitAmbiguous { digit: usize, ratio: f64 },

    #[error("degenerate scaling fit: {reason}")]
    DegenerateFit { reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization failure: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    /// Exit code the CLI uses for this error: 1 for configuration problems,
    /// 2 for numerical/runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidInput(_) | Error::Io(_) | Error::Serde(_) => 1,
            _ => 2,
        }
    }
}
