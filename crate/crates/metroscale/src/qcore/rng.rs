//! Deterministic randomness.
//!
//! Every stochastic operation in this crate takes an explicit `u64` seed and
//! draws from a ChaCha8 stream keyed by that seed. The seed-to-key expansion
//! and the bit-to-float mapping are implemented here, not inherited from a
//! library default, so identical seeds reproduce identical outcome streams
//! across releases.
//!
//! Independent substreams (one per Monte Carlo repetition, digit stage, ...)
//! are derived with [`mix_seed`], a SplitMix64 step over `root` and `index`.
//! Repetition `i` of a run seeded with `s` always uses `mix_seed(s, i)`, which
//! makes results independent of how repetitions are scheduled across threads.

use num_complex::Complex;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::qcore::matrix::ComplexMatrix;
use crate::scalar::Scalar;

/// One SplitMix64 output step.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive the seed of substream `index` from `root`.
///
/// `mix_seed(root, index)` = second SplitMix64 output of the state
/// `root + (index + 1) * GOLDEN`; collision-free in `index` for fixed root.
pub fn mix_seed(root: u64, index: u64) -> u64 {
    let mut state = root.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9E3779B97F4A7C15));
    splitmix64(&mut state);
    splitmix64(&mut state)
}

/// Seedable deterministic generator (ChaCha8 core).
pub struct DetRng {
    inner: ChaCha8Rng,
}

impl DetRng {
    /// Expand a `u64` seed into the 32-byte ChaCha key via four SplitMix64
    /// outputs in little-endian order.
    pub fn from_seed_u64(seed: u64) -> Self {
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Self {
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform scalar in `[0, 1)`.
    pub fn uniform<T: Scalar>(&mut self) -> T {
        T::from_unit_u64(self.next_u64())
    }

    /// Bernoulli draw with success probability `p`.
    pub fn bernoulli<T: Scalar>(&mut self, p: T) -> bool {
        self.uniform::<T>() < p
    }

    /// Standard normal via Box-Muller.
    pub fn gaussian<T: Scalar>(&mut self) -> T {
        let mut u1: T = self.uniform();
        if u1 <= T::zero() {
            u1 = T::min_positive_value();
        }
        let u2: T = self.uniform();
        let two = T::of(2.0);
        (-two * u1.ln()).sqrt() * (two * T::PI() * u2).cos()
    }

    /// Sample one index from the cumulative distribution `cdf` (ascending,
    /// last entry ~1). Binary search over a single uniform draw.
    pub fn sample_cdf<T: Scalar>(&mut self, cdf: &[T]) -> usize {
        let u: T = self.uniform();
        let mut lo = 0usize;
        let mut hi = cdf.len() - 1;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if u < cdf[mid] {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }
}

/// Seeded Haar-like random unitary: Gram-Schmidt of a complex Gaussian matrix
/// (orthonormalized twice for numerical safety).
pub fn random_unitary<T: Scalar>(dim: usize, seed: u64) -> ComplexMatrix<T> {
    let mut rng = DetRng::from_seed_u64(seed);
    let mut cols: Vec<Vec<Complex<T>>> = (0..dim)
        .map(|_| {
            (0..dim)
                .map(|_| Complex::new(rng.gaussian(), rng.gaussian()))
                .collect()
        })
        .collect();
    for _pass in 0..2 {
        for j in 0..dim {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let src = &done[k];
                let dst = &mut rest[0];
                let proj = src
                    .iter()
                    .zip(dst.iter())
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                        acc + a.conj() * *b
                    });
                for (d_i, s_i) in dst.iter_mut().zip(src) {
                    *d_i -= proj * *s_i;
                }
            }
            let norm = cols[j]
                .iter()
                .map(|z| z.norm_sqr())
                .fold(T::zero(), |a, b| a + b)
                .sqrt();
            let inv = Complex::new(T::one() / norm, T::zero());
            for z in &mut cols[j] {
                *z *= inv;
            }
        }
    }
    let mut m = ComplexMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            m[(i, j)] = *z;
        }
    }
    m
}

/// Seeded random Hermitian matrix with entries of order one.
pub fn random_hermitian<T: Scalar>(dim: usize, seed: u64) -> ComplexMatrix<T> {
    let mut rng = DetRng::from_seed_u64(seed);
    let mut m = ComplexMatrix::zeros(dim);
    for r in 0..dim {
        let diag: T = rng.gaussian();
        m[(r, r)] = Complex::new(diag, T::zero());
        for c in (r + 1)..dim {
            let z = Complex::new(rng.gaussian::<T>(), rng.gaussian::<T>());
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    m
}
