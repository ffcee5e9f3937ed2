//! metroscale: a simulator for parallel and sequential phase-estimation
//! strategies with exact resource accounting.
//!
//! The crate builds probe registers and generator spectra ([`qcore`],
//! [`genspec`]), runs the estimation protocols that attain the closed-form
//! precision bounds ([`protocols`], [`estimation`]), and drives sweeps,
//! scaling fits and reports from the CLI ([`harness`]).
//!
//! The numerical core is generic over the real scalar type; the type aliases
//! below pin the common concrete choices.

pub mod error;
pub mod estimation;
pub mod genspec;
pub mod harness;
pub mod pool;
pub mod protocols;
pub mod qcore;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ComplexMatrix64 = qcore::ComplexMatrix<f64>;
pub type StateVector64 = qcore::StateVector<f64>;
pub type EigenSystem64 = qcore::EigenSystem<f64>;
pub type Generator64 = genspec::Generator<f64>;
pub type EstimationResult64 = protocols::EstimationResult<f64>;

pub type ComplexMatrix32 = qcore::ComplexMatrix<f32>;
pub type StateVector32 = qcore::StateVector<f32>;
pub type Generator32 = genspec::Generator<f32>;
