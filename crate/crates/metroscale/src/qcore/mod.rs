//! Dense complex linear algebra for finite-dimensional probe registers:
//! states, Hermitian operators, unitary phase evolution, tensor products,
//! and projective measurement sampling.
//!
//! All types are immutable after construction and all operations are pure
//! functions of their inputs (seeds included), so everything here is safe to
//! call concurrently.

pub mod eigen;
pub mod matrix;
pub mod measure;
pub mod rng;
pub mod state;

pub use eigen::{eigensystem, eigensystem_with, phase_unitary, phase_unitary_from_eigen, EigenSystem};
pub use matrix::ComplexMatrix;
pub use measure::{apply, apply_with, measure_projective};
pub use rng::{mix_seed, random_hermitian, random_unitary, DetRng};
pub use state::{StateVector, STATEVECTOR_DIM_CAP};

use crate::scalar::Scalar;

/// Numerical tolerances for validity checks. Defaults match the contracts of
/// the individual operations; override per call site where needed.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances<T> {
    /// Max entrywise `|H - H^dag|` accepted as Hermitian.
    pub hermiticity: T,
    /// Max entrywise `|U^dag U - I|` accepted as unitary.
    pub unitarity: T,
    /// Max `| ||psi|| - 1 |` accepted as normalized.
    pub normalization: T,
    /// Max entrywise `|V^dag V - I|` for eigenvector sets.
    pub orthonormality: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            hermiticity: T::invariant_tol(),
            unitarity: T::precondition_tol(),
            normalization: T::invariant_tol(),
            orthonormality: T::invariant_tol(),
        }
    }
}
