//! Floating-point scalar abstraction: the whole simulation core is generic
//! over `Scalar`, with `f64` as the working type of the CLI harness.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type underlying states, operators and statistics.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Map a raw `u64` to a uniform value in `[0, 1)`.
    ///
    /// The mapping is fixed per type (top 53 bits for `f64`, top 24 bits for
    /// `f32`) so that seeded experiments reproduce bit-identically across
    /// releases regardless of any RNG-library distribution changes.
    fn from_unit_u64(bits: u64) -> Self;

    /// Shorthand for lossy conversion from `f64` constants.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    /// Default tolerance for structural invariants (hermiticity,
    /// normalization, orthonormality).
    fn invariant_tol() -> Self;

    /// Default tolerance for operation preconditions (unitarity checks).
    fn precondition_tol() -> Self;
}

impl Scalar for f64 {
    fn from_unit_u64(bits: u64) -> Self {
        // 53 significant bits, same construction as the standard open [0,1) trick
        (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn invariant_tol() -> Self {
        1e-10
    }

    fn precondition_tol() -> Self {
        1e-8
    }
}

impl Scalar for f32 {
    fn from_unit_u64(bits: u64) -> Self {
        (bits >> 40) as f32 * (1.0 / (1u32 << 24) as f32)
    }

    fn invariant_tol() -> Self {
        1e-5
    }

    fn precondition_tol() -> Self {
        1e-4
    }
}
