//! Dense square complex matrices, row-major storage.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Square complex matrix over real scalar `T`.
///
/// Houses generators, unitaries and observables. All probe-register algebra
/// in this crate runs through this type and [`super::StateVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            entries: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    /// Build from a row-major entry list; `entries.len()` must be `dim^2`.
    pub fn from_entries(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
                context: "matrix entry count",
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { dim, entries })
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex::new(v, T::zero());
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
                context: "matrix product",
            });
        }
        let d = self.dim;
        let mut out = Self::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
                context: "matrix sum",
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| *a + *b)
            .collect();
        Ok(Self {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| *z * factor).collect(),
        }
    }

    /// Kronecker product `self (x) rhs`; left factor owns the high-order index.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let d = self.dim * rhs.dim;
        let mut out = Self::zeros(d);
        for ar in 0..self.dim {
            for ac in 0..self.dim {
                let a = self[(ar, ac)];
                for br in 0..rhs.dim {
                    for bc in 0..rhs.dim {
                        out[(ar * rhs.dim + br, ac * rhs.dim + bc)] = a * rhs[(br, bc)];
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product on a raw amplitude slice.
    pub(crate) fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        debug_assert_eq!(v.len(), self.dim);
        let mut out = vec![Complex::zero(); self.dim];
        for r in 0..self.dim {
            let mut acc = Complex::zero();
            for c in 0..self.dim {
                acc += self[(r, c)] * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// Largest entrywise deviation from the adjoint; 0 for exactly Hermitian input.
    pub fn hermiticity_error(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.dim {
            for c in r..self.dim {
                let d = self[(r, c)] - self[(c, r)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Largest entrywise deviation of `U^dag U` from the identity.
    pub fn unitarity_error(&self) -> T {
        let gram = self
            .adjoint()
            .mul(self)
            .expect("square matrices always compose");
        let mut worst = T::zero();
        for r in 0..self.dim {
            for c in 0..self.dim {
                let expected = if r == c { Complex::one() } else { Complex::zero() };
                worst = worst.max((gram[(r, c)] - expected).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs_entry(&self) -> T {
        self.entries
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

impl<T> std::ops::Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.entries[r * self.dim + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.entries[r * self.dim + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::<f64>::identity(2);
        let i4 = i2.tensor(&i2);
        assert_eq!(i4, ComplexMatrix::identity(4));
    }

    #[test]
    fn adjoint_of_product_reverses() {
        let a = ComplexMatrix::from_entries(2, vec![c(1.0, 2.0), c(0.5, -1.0), c(0.0, 3.0), c(2.0, 0.0)])
            .unwrap();
        let b = ComplexMatrix::from_entries(2, vec![c(0.0, 1.0), c(1.0, 1.0), c(-2.0, 0.5), c(1.5, 0.0)])
            .unwrap();
        let lhs = a.mul(&b).unwrap().adjoint();
        let rhs = b.adjoint().mul(&a.adjoint()).unwrap();
        for r in 0..2 {
            for cix in 0..2 {
                assert!((lhs[(r, cix)] - rhs[(r, cix)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn hermiticity_error_detects_asymmetry() {
        let h = ComplexMatrix::from_entries(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(2.0, 0.0)])
            .unwrap();
        // off-diagonal pair (i, i) is not conjugate-symmetric
        assert!(h.hermiticity_error() > 1.0);
        let h2 = ComplexMatrix::from_entries(2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)])
            .unwrap();
        assert_eq!(h2.hermiticity_error(), 0.0);
    }

    #[test]
    fn entry_count_must_match() {
        assert!(ComplexMatrix::from_entries(2, vec![c(1.0, 0.0); 3]).is_err());
    }
}
