//! Normalized complex state vectors over a probe register.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qcore::matrix::ComplexMatrix;
use crate::qcore::rng::DetRng;
use crate::scalar::Scalar;

/// Largest register dimension the dense statevector paths will touch.
pub const STATEVECTOR_DIM_CAP: u128 = 1 << 20;

/// Normalized amplitude vector; the state of one probe or of a whole
/// `d^N`-dimensional register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Scalar> StateVector<T> {
    /// Computational basis state `|index>`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amplitudes = vec![Complex::zero(); dim];
        amplitudes[index] = Complex::one();
        Self { amplitudes }
    }

    /// Build from amplitudes, requiring normalization within `tol`.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>, tol: T) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidInput("empty state vector".into()));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        let state = Self { amplitudes };
        let err = (state.norm() - T::one()).abs();
        if err > tol {
            return Err(Error::InvalidInput(format!(
                "state not normalized: |norm - 1| = {:?}",
                err
            )));
        }
        Ok(state)
    }

    /// Build from arbitrary nonzero amplitudes, normalizing them.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let norm = amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        if norm <= T::zero() || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize zero state".into()));
        }
        Ok(Self {
            amplitudes: amplitudes
                .into_iter()
                .map(|z| z / Complex::new(norm, T::zero()))
                .collect(),
        })
    }

    /// Haar-like random pure state: i.i.d. complex Gaussian amplitudes, normalized.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = DetRng::from_seed_u64(seed);
        let amplitudes: Vec<Complex<T>> = (0..dim)
            .map(|_| Complex::new(rng.gaussian(), rng.gaussian()))
            .collect();
        Self::normalized(amplitudes).expect("gaussian state is nonzero")
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
                context: "inner product",
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// Tensor product `self (x) rhs`; the left factor owns the high-order index.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let mut amplitudes = Vec::with_capacity(self.dim() * rhs.dim());
        for a in &self.amplitudes {
            for b in &rhs.amplitudes {
                amplitudes.push(*a * *b);
            }
        }
        Self { amplitudes }
    }

    /// `self (x) self (x) ... (x) self`, `n` factors.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("tensor power of zero factors".into()));
        }
        let total = (self.dim() as u128).pow(n as u32);
        if total > STATEVECTOR_DIM_CAP {
            return Err(Error::DimensionTooLarge {
                dim: total,
                cap: STATEVECTOR_DIM_CAP,
            });
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self);
        }
        Ok(out)
    }

    /// Apply a `d x d` operator to one site of a register of `n_sites` probes
    /// of local dimension `d`. Site 0 is the most significant factor, matching
    /// the index convention of [`StateVector::tensor`].
    pub fn apply_at_site(&self, op: &ComplexMatrix<T>, site: usize, d: usize, n_sites: usize) -> Result<Self> {
        if op.dim() != d {
            return Err(Error::DimensionMismatch {
                left: op.dim(),
                right: d,
                context: "site operator dimension",
            });
        }
        let expected = d.checked_pow(n_sites as u32).ok_or(Error::DimensionTooLarge {
            dim: u128::MAX,
            cap: STATEVECTOR_DIM_CAP,
        })?;
        if self.dim() != expected || site >= n_sites {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: expected,
                context: "register dimension for site application",
            });
        }
        // stride between consecutive values of the site index
        let stride = d.pow((n_sites - 1 - site) as u32);
        let block = stride * d;
        let mut out = vec![Complex::zero(); self.dim()];
        let mut local = vec![Complex::zero(); d];
        for base in (0..self.dim()).step_by(block) {
            for offset in 0..stride {
                for (k, slot) in local.iter_mut().enumerate() {
                    *slot = self.amplitudes[base + offset + k * stride];
                }
                for r in 0..d {
                    let mut acc = Complex::zero();
                    for c in 0..d {
                        acc += op[(r, c)] * local[c];
                    }
                    out[base + offset + r * stride] = acc;
                }
            }
        }
        Ok(Self { amplitudes: out })
    }
}
