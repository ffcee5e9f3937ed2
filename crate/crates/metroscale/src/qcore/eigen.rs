//! Hermitian eigendecomposition (cyclic Jacobi) and the spectral-form
//! phase unitary `exp(-i phi H)`.
//!
//! Jacobi is the right tool here: every matrix this crate diagonalizes is a
//! small dense Hermitian operator (a probe generator or a probe-plus-ancilla
//! sequential generator), and the accumulated rotations keep the eigenvector
//! matrix unitary to machine precision even for degenerate spectra.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::Tolerances;
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem<T> {
    eigenvalues: Vec<T>,
    eigenvectors: ComplexMatrix<T>,
}

impl<T: Scalar> EigenSystem<T> {
    /// Assemble from precomputed parts, validating orthonormality of the
    /// column set and the ascending eigenvalue order.
    pub fn from_parts(eigenvalues: Vec<T>, eigenvectors: ComplexMatrix<T>) -> Result<Self> {
        if eigenvalues.len() != eigenvectors.dim() {
            return Err(Error::DimensionMismatch {
                left: eigenvalues.len(),
                right: eigenvectors.dim(),
                context: "eigenvalue count vs eigenvector matrix",
            });
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput("eigenvalues not sorted ascending".into()));
        }
        let ortho = eigenvectors.unitarity_error();
        let tol = Tolerances::<T>::default().orthonormality;
        if ortho > tol {
            return Err(Error::NonUnitary {
                deviation: ortho.to_f64().unwrap_or(f64::NAN),
                tolerance: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix<T> {
        &self.eigenvectors
    }

    /// Column `k` as an owned amplitude vector.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex<T>> {
        (0..self.dim()).map(|r| self.eigenvectors[(r, k)]).collect()
    }

    /// `V diag(f(lambda)) V^dag` for an arbitrary spectral function.
    pub fn spectral_map(&self, f: impl Fn(T) -> Complex<T>) -> ComplexMatrix<T> {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d);
        for k in 0..d {
            let fk = f(self.eigenvalues[k]);
            if fk.is_zero() {
                continue;
            }
            for r in 0..d {
                let vr = self.eigenvectors[(r, k)] * fk;
                for c in 0..d {
                    out[(r, c)] += vr * self.eigenvectors[(c, k)].conj();
                }
            }
        }
        out
    }

    /// Reconstruct the original matrix, `V diag(lambda) V^dag`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.spectral_map(|lambda| Complex::new(lambda, T::zero()))
    }
}

/// Eigendecompose a Hermitian matrix with the default tolerances.
pub fn eigensystem<T: Scalar>(h: &ComplexMatrix<T>) -> Result<EigenSystem<T>> {
    eigensystem_with(h, &Tolerances::default())
}

/// Eigendecompose a Hermitian matrix.
///
/// Errors with `NonHermitian` if `max |H - H^dag|` exceeds `tol.hermiticity`
/// and with `NumericalFailure` if the Jacobi sweeps fail to drive the
/// off-diagonal norm to zero.
pub fn eigensystem_with<T: Scalar>(
    h: &ComplexMatrix<T>,
    tol: &Tolerances<T>,
) -> Result<EigenSystem<T>> {
    let herm = h.hermiticity_error();
    if herm > tol.hermiticity {
        return Err(Error::NonHermitian {
            deviation: herm.to_f64().unwrap_or(f64::NAN),
            tolerance: tol.hermiticity.to_f64().unwrap_or(f64::NAN),
        });
    }
    let d = h.dim();
    let mut a = h.clone();
    // symmetrize exactly so rounding in the input cannot bias the sweeps
    for r in 0..d {
        a[(r, r)] = Complex::new(a[(r, r)].re, T::zero());
        for c in (r + 1)..d {
            let avg = (a[(r, c)] + a[(c, r)].conj()) * Complex::new(T::of(0.5), T::zero());
            a[(r, c)] = avg;
            a[(c, r)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(d);
    let scale = a.frobenius_norm().max(T::min_positive_value());
    let stop = scale * T::epsilon() * T::of(16.0 * d as f64);

    let mut converged = d < 2;
    let mut last_off = T::zero();
    for _sweep in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..d {
            for q in (p + 1)..d {
                off += a[(p, q)].norm_sqr();
            }
        }
        last_off = off.sqrt();
        if last_off <= stop {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NumericalFailure {
            sweeps: MAX_SWEEPS,
            off_norm: last_off.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut order: Vec<usize> = (0..d).collect();
    let values: Vec<T> = (0..d).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).expect("finite eigenvalues"));
    let eigenvalues: Vec<T> = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(d);
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..d {
            eigenvectors[(r, new_col)] = v[(r, old_col)];
        }
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation zeroing `a[(p, q)]`; accumulates into `v`.
fn rotate<T: Scalar>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let m = apq.norm();
    if m <= T::min_positive_value() {
        return;
    }
    // phase that makes the pivot real, then a real Jacobi angle
    let phase = apq / Complex::new(m, T::zero());
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (m + m);
    let t = {
        let sign = if theta < T::zero() { -T::one() } else { T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;

    // G = [[c, s], [-s e^{-i alpha}, c e^{-i alpha}]] on the (p, q) plane
    let e_neg = phase.conj();
    let gpp = Complex::new(c, T::zero());
    let gpq = Complex::new(s, T::zero());
    let gqp = -Complex::new(s, T::zero()) * e_neg;
    let gqq = Complex::new(c, T::zero()) * e_neg;

    let d = a.dim();
    // rows: A <- G^dag A
    for j in 0..d {
        let ap = a[(p, j)];
        let aq = a[(q, j)];
        a[(p, j)] = gpp.conj() * ap + gqp.conj() * aq;
        a[(q, j)] = gpq.conj() * ap + gqq.conj() * aq;
    }
    // columns: A <- A G, V <- V G
    for i in 0..d {
        let ap = a[(i, p)];
        let aq = a[(i, q)];
        a[(i, p)] = ap * gpp + aq * gqp;
        a[(i, q)] = ap * gpq + aq * gqq;
        let vp = v[(i, p)];
        let vq = v[(i, q)];
        v[(i, p)] = vp * gpp + vq * gqp;
        v[(i, q)] = vp * gpq + vq * gqq;
    }
    // pivot is zero by construction; clamp rounding dust
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
}

/// Phase-evolution unitary `U_phi = exp(-i phi H)` in spectral form,
/// `V diag(exp(-i phi lambda_k)) V^dag`.
pub fn phase_unitary<T: Scalar>(h: &ComplexMatrix<T>, phi: T) -> Result<ComplexMatrix<T>> {
    let eigen = eigensystem(h)?;
    Ok(phase_unitary_from_eigen(&eigen, phi))
}

/// Same as [`phase_unitary`] but reusing a cached eigensystem.
pub fn phase_unitary_from_eigen<T: Scalar>(eigen: &EigenSystem<T>, phi: T) -> ComplexMatrix<T> {
    eigen.spectral_map(|lambda| {
        let angle = -phi * lambda;
        Complex::new(angle.cos(), angle.sin())
    })
}
