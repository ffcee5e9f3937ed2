//! Unitary application and projective measurement sampling.

use crate::error::{Error, Result};
use crate::qcore::eigen::EigenSystem;
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::rng::DetRng;
use crate::qcore::state::StateVector;
use crate::qcore::Tolerances;
use crate::scalar::Scalar;

/// Apply a unitary to a state: `|psi'> = U |psi>`.
///
/// Checks dimensions and unitarity (default tolerance), then renormalizes the
/// output so downstream consumers always see a unit vector.
pub fn apply<T: Scalar>(u: &ComplexMatrix<T>, psi: &StateVector<T>) -> Result<StateVector<T>> {
    apply_with(u, psi, &Tolerances::default())
}

pub fn apply_with<T: Scalar>(
    u: &ComplexMatrix<T>,
    psi: &StateVector<T>,
    tol: &Tolerances<T>,
) -> Result<StateVector<T>> {
    if u.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: psi.dim(),
            context: "operator applied to state",
        });
    }
    let dev = u.unitarity_error();
    if dev > tol.unitarity {
        return Err(Error::NonUnitary {
            deviation: dev.to_f64().unwrap_or(f64::NAN),
            tolerance: tol.unitarity.to_f64().unwrap_or(f64::NAN),
        });
    }
    StateVector::normalized(u.mul_vec(psi.amplitudes()))
}

/// Projective measurement in the given eigenbasis: multinomial sample of
/// `shots` outcomes from `p_k = |<basis_k|psi>|^2`, deterministic per seed.
/// Returns one count per basis index, summing to `shots`.
pub fn measure_projective<T: Scalar>(
    psi: &StateVector<T>,
    basis: &EigenSystem<T>,
    shots: u64,
    seed: u64,
) -> Result<Vec<u64>> {
    if basis.dim() != psi.dim() {
        return Err(Error::DimensionMismatch {
            left: basis.dim(),
            right: psi.dim(),
            context: "measurement basis vs state",
        });
    }
    if shots == 0 {
        return Err(Error::InvalidInput("measurement needs at least one shot".into()));
    }
    let d = psi.dim();
    let mut probs: Vec<T> = Vec::with_capacity(d);
    for k in 0..d {
        let mut amp = num_complex::Complex::new(T::zero(), T::zero());
        for r in 0..d {
            amp += basis.eigenvectors()[(r, k)].conj() * psi.amplitudes()[r];
        }
        probs.push(amp.norm_sqr());
    }
    let total: T = probs.iter().copied().fold(T::zero(), |a, b| a + b);
    let mut cdf: Vec<T> = Vec::with_capacity(d);
    let mut acc = T::zero();
    for p in &probs {
        acc += *p / total;
        cdf.push(acc);
    }
    // guard the top of the cdf against rounding
    if let Some(last) = cdf.last_mut() {
        *last = T::one();
    }

    let mut rng = DetRng::from_seed_u64(seed);
    let mut counts = vec![0u64; d];
    for _ in 0..shots {
        counts[rng.sample_cdf(&cdf)] += 1;
    }
    Ok(counts)
}
