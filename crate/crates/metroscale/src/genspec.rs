//! Generator analysis: extremal eigenpairs, optimal probe states, collective
//! variance, and the generator of sequential (multiround) circuits.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::qcore::{
    eigensystem, phase_unitary_from_eigen, random_unitary, ComplexMatrix, EigenSystem, StateVector,
    STATEVECTOR_DIM_CAP,
};
use crate::scalar::Scalar;

/// A Hermitian phase generator with its cached eigensystem and extremal
/// eigenpair bookkeeping.
#[derive(Debug, Clone)]
pub struct Generator<T> {
    matrix: ComplexMatrix<T>,
    eigen: EigenSystem<T>,
    min_index: usize,
    max_index: usize,
}

impl<T: Scalar> Generator<T> {
    /// Build from a Hermitian matrix; eigendecomposes once and caches.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let eigen = eigensystem(&matrix)?;
        let values = eigen.eigenvalues();
        let d = values.len();
        let lambda_max = values[d - 1];
        // ties on the extremal eigenvalue resolve to the lowest index
        let tie = T::of(1e-9) * T::one().max(lambda_max.abs());
        let max_index = (0..d)
            .find(|&k| values[k] >= lambda_max - tie)
            .unwrap_or(d - 1);
        Ok(Self {
            matrix,
            eigen,
            min_index: 0,
            max_index,
        })
    }

    /// Probe local dimension `d`.
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn eigen(&self) -> &EigenSystem<T> {
        &self.eigen
    }

    pub fn lambda_min(&self) -> T {
        self.eigen.eigenvalues()[self.min_index]
    }

    pub fn lambda_max(&self) -> T {
        self.eigen.eigenvalues()[self.max_index]
    }

    /// Spectral gap `lambda_max - lambda_min`; the per-use phase sensitivity.
    pub fn gap(&self) -> T {
        self.lambda_max() - self.lambda_min()
    }

    /// True when the gap is numerically indistinguishable from zero, in which
    /// case the phase is unobservable and every protocol refuses to run.
    pub fn gap_is_zero(&self) -> bool {
        let scale = T::one()
            .max(self.lambda_max().abs())
            .max(self.lambda_min().abs());
        let floor = T::of(1e-12).max(T::epsilon() * T::of(16.0));
        self.gap() <= scale * floor
    }

    /// Eigenvector of the minimum eigenvalue.
    pub fn vec_min(&self) -> StateVector<T> {
        StateVector::normalized(self.eigen.eigenvector(self.min_index))
            .expect("eigenvector is nonzero")
    }

    /// Eigenvector of the maximum eigenvalue.
    pub fn vec_max(&self) -> StateVector<T> {
        StateVector::normalized(self.eigen.eigenvector(self.max_index))
            .expect("eigenvector is nonzero")
    }

    /// `exp(-i phi H)` on one probe, from the cached eigensystem.
    pub fn phase_unitary(&self, phi: T) -> ComplexMatrix<T> {
        phase_unitary_from_eigen(&self.eigen, phi)
    }
}

/// Equal superposition of the extremal eigenvectors,
/// `(|lambda_max> + |lambda_min>)/sqrt(2)`: the single-probe state of maximum
/// generator spread.
pub fn extremal_superposition<T: Scalar>(g: &Generator<T>) -> Result<StateVector<T>> {
    if g.gap_is_zero() {
        return Err(Error::ZeroGap);
    }
    let vmin = g.vec_min();
    let vmax = g.vec_max();
    let amps: Vec<Complex<T>> = vmin
        .amplitudes()
        .iter()
        .zip(vmax.amplitudes())
        .map(|(a, b)| *a + *b)
        .collect();
    StateVector::normalized(amps)
}

/// The maximally sensitive entangled state of `N` probes:
/// `(|lambda_min>^N + |lambda_max>^N)/sqrt(2)`.
pub fn ghz_state<T: Scalar>(g: &Generator<T>, n: usize) -> Result<StateVector<T>> {
    if g.gap_is_zero() {
        return Err(Error::ZeroGap);
    }
    if n == 0 {
        return Err(Error::InvalidInput("ghz_state needs at least one probe".into()));
    }
    let total = (g.dim() as u128).pow(n as u32);
    if total > STATEVECTOR_DIM_CAP {
        return Err(Error::DimensionTooLarge {
            dim: total,
            cap: STATEVECTOR_DIM_CAP,
        });
    }
    let low = g.vec_min().tensor_power(n)?;
    let high = g.vec_max().tensor_power(n)?;
    let amps: Vec<Complex<T>> = low
        .amplitudes()
        .iter()
        .zip(high.amplitudes())
        .map(|(a, b)| *a + *b)
        .collect();
    StateVector::normalized(amps)
}

/// Standard deviation of the collective generator `h = sum_j H_j` on an
/// `N`-probe state, computed by applying `H` site by site (the full
/// `d^N x d^N` operator is never materialized): `<h>` from one pass,
/// `<h^2>` as the squared norm of `h|psi>`.
pub fn delta_h<T: Scalar>(psi: &StateVector<T>, g: &Generator<T>, n: usize) -> Result<T> {
    let d = g.dim();
    let expected = (d as u128).pow(n as u32);
    if n == 0 || expected != psi.dim() as u128 {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: expected.min(usize::MAX as u128) as usize,
            context: "state dimension vs d^N",
        });
    }
    let mut h_psi = vec![Complex::<T>::zero(); psi.dim()];
    for site in 0..n {
        let term = psi.apply_at_site(g.matrix(), site, d, n)?;
        for (acc, z) in h_psi.iter_mut().zip(term.amplitudes()) {
            *acc += *z;
        }
    }
    let mean = psi
        .amplitudes()
        .iter()
        .zip(&h_psi)
        .fold(Complex::<T>::zero(), |acc, (a, b)| acc + a.conj() * *b)
        .re;
    let second_moment: T = h_psi
        .iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |a, b| a + b);
    Ok((second_moment - mean * mean).max(T::zero()).sqrt())
}

/// A multiround circuit `W_phi = V_N U_phi V_{N-1} ... V_1 U_phi V_0`, with
/// the interleaved unitaries acting on probe (x) ancilla.
#[derive(Debug, Clone)]
pub struct SequentialCircuit<T> {
    generator: Generator<T>,
    interleaved: Vec<ComplexMatrix<T>>,
    ancilla_dim: usize,
}

impl<T: Scalar> SequentialCircuit<T> {
    pub fn new(
        generator: Generator<T>,
        interleaved: Vec<ComplexMatrix<T>>,
        ancilla_dim: usize,
    ) -> Result<Self> {
        if ancilla_dim == 0 {
            return Err(Error::InvalidInput("ancilla dimension must be >= 1".into()));
        }
        if interleaved.len() < 2 {
            return Err(Error::InvalidInput(
                "a sequential circuit needs N+1 >= 2 interleaved unitaries".into(),
            ));
        }
        let full_dim = generator.dim() * ancilla_dim;
        let unitarity = crate::qcore::Tolerances::<T>::default().unitarity;
        for (index, v) in interleaved.iter().enumerate() {
            if v.dim() != full_dim {
                return Err(Error::DimensionMismatch {
                    left: v.dim(),
                    right: full_dim,
                    context: "interleaved unitary vs probe x ancilla",
                });
            }
            let dev = v.unitarity_error();
            if dev > unitarity {
                return Err(Error::NonUnitaryInterleave {
                    index,
                    deviation: dev.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(Self {
            generator,
            interleaved,
            ancilla_dim,
        })
    }

    /// Circuit with Haar-like random interleaved unitaries.
    pub fn random(generator: Generator<T>, n: usize, ancilla_dim: usize, seed: u64) -> Result<Self> {
        let full_dim = generator.dim() * ancilla_dim;
        let interleaved = (0..=n)
            .map(|k| random_unitary(full_dim, crate::qcore::mix_seed(seed, k as u64)))
            .collect();
        Self::new(generator, interleaved, ancilla_dim)
    }

    /// Number of `U_phi` applications in the circuit.
    pub fn n(&self) -> usize {
        self.interleaved.len() - 1
    }

    pub fn generator(&self) -> &Generator<T> {
        &self.generator
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    fn u_full(&self, phi: T) -> ComplexMatrix<T> {
        self.generator
            .phase_unitary(phi)
            .tensor(&ComplexMatrix::identity(self.ancilla_dim))
    }

    fn h_full(&self) -> ComplexMatrix<T> {
        self.generator
            .matrix()
            .tensor(&ComplexMatrix::identity(self.ancilla_dim))
    }

    /// The full circuit unitary at phase `phi`.
    pub fn w_unitary(&self, phi: T) -> ComplexMatrix<T> {
        let u = self.u_full(phi);
        let mut w = self.interleaved[0].clone();
        for v in &self.interleaved[1..] {
            w = v.mul(&u.mul(&w).expect("dims agree")).expect("dims agree");
        }
        w
    }
}

/// The `N` conjugated copies of `H` whose sum is the circuit generator
/// `i (dW/dphi) W^dag`: term `k` is `L_k H L_k^dag` with
/// `L_k = V_N U_phi ... U_phi V_k` (the part of the circuit after the `k`-th
/// `U_phi`). Each term has the spectrum of `H`.
pub fn sequential_generator_terms<T: Scalar>(
    c: &SequentialCircuit<T>,
    phi: T,
) -> Result<Vec<ComplexMatrix<T>>> {
    let n = c.n();
    let u = c.u_full(phi);
    let h_full = c.h_full();
    let mut terms = Vec::with_capacity(n);
    let mut left = c.interleaved[n].clone();
    for k in (1..=n).rev() {
        let term = left
            .mul(&h_full)
            .and_then(|m| m.mul(&left.adjoint()))
            .expect("dims agree");
        terms.push(term);
        if k > 1 {
            left = left
                .mul(&u)
                .and_then(|m| m.mul(&c.interleaved[k - 1]))
                .expect("dims agree");
        }
    }
    Ok(terms)
}

/// Generator of the whole multiround circuit, `h = sum_k H'_k(phi)`.
pub fn sequential_generator<T: Scalar>(c: &SequentialCircuit<T>, phi: T) -> Result<ComplexMatrix<T>> {
    let terms = sequential_generator_terms(c, phi)?;
    let dim = c.generator.dim() * c.ancilla_dim;
    let mut h = ComplexMatrix::zeros(dim);
    for term in &terms {
        h = h.add(term).expect("dims agree");
    }
    let herm = h.hermiticity_error();
    if herm > T::of(1e-8) {
        return Err(Error::NonHermitian {
            deviation: herm.to_f64().unwrap_or(f64::NAN),
            tolerance: 1e-8,
        });
    }
    Ok(h)
}

/// Spectrum report of the multiround generator against the
/// `[N lambda_min, N lambda_max]` envelope.
#[derive(Debug, Clone)]
pub struct SpectrumBoundReport<T> {
    pub max_eig: T,
    pub min_eig: T,
    pub upper_bound: T,
    pub lower_bound: T,
    pub within_bounds: bool,
}

/// Check that the spectrum of the multiround generator lies inside
/// `[N lambda_min - 1e-6, N lambda_max + 1e-6]`.
pub fn spectrum_bound_check<T: Scalar>(
    c: &SequentialCircuit<T>,
    phi: T,
) -> Result<SpectrumBoundReport<T>> {
    let h = sequential_generator(c, phi)?;
    let eig = eigensystem(&h)?;
    let values = eig.eigenvalues();
    let (min_eig, max_eig) = (values[0], values[values.len() - 1]);
    let n_t = T::of(c.n() as f64);
    let upper_bound = n_t * c.generator.lambda_max();
    let lower_bound = n_t * c.generator.lambda_min();
    let slack = T::of(1e-6);
    Ok(SpectrumBoundReport {
        max_eig,
        min_eig,
        upper_bound,
        lower_bound,
        within_bounds: max_eig <= upper_bound + slack && min_eig >= lower_bound - slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{mix_seed, random_hermitian, DetRng};

    fn qubit_z() -> Generator<f64> {
        Generator::new(ComplexMatrix::diagonal(&[-0.5, 0.5])).unwrap()
    }

    fn qutrit() -> Generator<f64> {
        Generator::new(ComplexMatrix::diagonal(&[0.0, 1.0, 2.0])).unwrap()
    }

    /// Direct `<H^2> - <H>^2` evaluation on a single probe, independent of delta_h.
    fn single_probe_variance(psi: &StateVector<f64>, h: &ComplexMatrix<f64>) -> f64 {
        let h_psi = StateVector::normalized(
            psi.amplitudes()
                .iter()
                .enumerate()
                .map(|(r, _)| {
                    (0..h.dim()).fold(Complex::new(0.0, 0.0), |acc, c| {
                        acc + h[(r, c)] * psi.amplitudes()[c]
                    })
                })
                .collect::<Vec<_>>(),
        );
        // recompute without normalization: raw quadratic forms
        let raw: Vec<Complex<f64>> = (0..h.dim())
            .map(|r| {
                (0..h.dim()).fold(Complex::new(0.0, 0.0), |acc, c| {
                    acc + h[(r, c)] * psi.amplitudes()[c]
                })
            })
            .collect();
        let mean = psi
            .amplitudes()
            .iter()
            .zip(&raw)
            .fold(Complex::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
            .re;
        let second: f64 = raw.iter().map(|z| z.norm_sqr()).sum();
        drop(h_psi);
        second - mean * mean
    }

    #[test]
    fn extremal_superposition_qubit() {
        let g = qubit_z();
        let psi = extremal_superposition(&g).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((psi.amplitudes()[0].norm() - inv_sqrt2).abs() < 1e-12);
        assert!((psi.amplitudes()[1].norm() - inv_sqrt2).abs() < 1e-12);
    }

    #[test]
    fn extremal_superposition_qutrit_variance() {
        let g = qutrit();
        let psi = extremal_superposition(&g).unwrap();
        assert!((psi.amplitudes()[0].norm_sqr() - 0.5).abs() < 1e-12);
        assert!(psi.amplitudes()[1].norm() < 1e-12);
        assert!((psi.amplitudes()[2].norm_sqr() - 0.5).abs() < 1e-12);
        let var = single_probe_variance(&psi, g.matrix());
        assert!((var - 1.0).abs() < 1e-10, "variance {var}");
    }

    #[test]
    fn extremal_superposition_attains_quarter_gap_squared() {
        for seed in [3u64, 5, 11] {
            let g = Generator::new(random_hermitian::<f64>(4, seed)).unwrap();
            let psi = extremal_superposition(&g).unwrap();
            let var = single_probe_variance(&psi, g.matrix());
            let target = g.gap() * g.gap() / 4.0;
            assert!((var - target).abs() < 1e-9, "seed {seed}: {var} vs {target}");
        }
    }

    #[test]
    fn zero_gap_is_rejected() {
        let g = Generator::new(ComplexMatrix::diagonal(&[1.0, 1.0])).unwrap();
        assert!(g.gap_is_zero());
        assert!(matches!(extremal_superposition(&g), Err(Error::ZeroGap)));
        assert!(matches!(ghz_state(&g, 2), Err(Error::ZeroGap)));
    }

    #[test]
    fn ghz_reduces_to_extremal_superposition_at_one_probe() {
        let g = qubit_z();
        let ghz = ghz_state(&g, 1).unwrap();
        let ext = extremal_superposition(&g).unwrap();
        for (a, b) in ghz.amplitudes().iter().zip(ext.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn ghz_three_qubits_has_two_amplitudes() {
        let g = qubit_z();
        let ghz = ghz_state(&g, 3).unwrap();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ghz.amplitudes()[0].norm() - inv_sqrt2).abs() < 1e-12);
        assert!((ghz.amplitudes()[7].norm() - inv_sqrt2).abs() < 1e-12);
        for k in 1..7 {
            assert!(ghz.amplitudes()[k].norm() < 1e-14, "index {k}");
        }
    }

    #[test]
    fn ghz_variance_scales_quadratically() {
        let g = qubit_z();
        for n in [2usize, 4, 5] {
            let ghz = ghz_state(&g, n).unwrap();
            let dh = delta_h(&ghz, &g, n).unwrap();
            let target = n as f64 * g.gap() / 2.0;
            assert!((dh - target).abs() < 1e-8, "N={n}: {dh} vs {target}");
        }
    }

    #[test]
    fn qutrit_ghz_delta_h() {
        let g = qutrit();
        let ghz = ghz_state(&g, 2).unwrap();
        let dh = delta_h(&ghz, &g, 2).unwrap();
        assert!((dh - 2.0).abs() < 1e-9, "delta_h {dh}");
    }

    #[test]
    fn delta_h_on_extremal_product() {
        let g = qubit_z();
        for n in [1usize, 4, 5] {
            let probe = extremal_superposition(&g).unwrap();
            let product = probe.tensor_power(n).unwrap();
            let dh = delta_h(&product, &g, n).unwrap();
            let target = (n as f64).sqrt() * g.gap() / 2.0;
            assert!((dh - target).abs() < 1e-10, "N={n}: {dh}");
        }
    }

    #[test]
    fn delta_h_vanishes_on_eigenstates() {
        let g = qubit_z();
        let top = g.vec_max().tensor_power(4).unwrap();
        let dh = delta_h(&top, &g, 4).unwrap();
        assert!(dh < 1e-10, "delta_h {dh}");
    }

    #[test]
    fn product_states_respect_the_sqrt_n_envelope() {
        // randomized product states stay below sqrt(N) gap / 2
        let g = qubit_z();
        let n = 5usize;
        let cap = (n as f64).sqrt() * g.gap() / 2.0 + 1e-9;
        for seed in 0u64..200 {
            let mut product = StateVector::random(2, mix_seed(seed, 0));
            for site in 1..n {
                product = product.tensor(&StateVector::random(2, mix_seed(seed, site as u64)));
            }
            let dh = delta_h(&product, &g, n).unwrap();
            assert!(dh <= cap, "seed {seed}: {dh} above {cap}");
        }
    }

    #[test]
    fn entangled_states_respect_the_n_envelope() {
        let g = qubit_z();
        let n = 5usize;
        let cap = n as f64 * g.gap() / 2.0 + 1e-9;
        for seed in 0u64..200 {
            let psi = StateVector::random(32, 1000 + seed);
            let dh = delta_h(&psi, &g, n).unwrap();
            assert!(dh <= cap, "seed {seed}: {dh} above {cap}");
        }
    }

    #[test]
    fn identity_interleaves_collapse_to_n_copies() {
        let g = qubit_z();
        let n = 3;
        let ident = ComplexMatrix::identity(2);
        let c = SequentialCircuit::new(g.clone(), vec![ident; n + 1], 1).unwrap();
        let h = sequential_generator(&c, 0.37).unwrap();
        let expected = g.matrix().scale(Complex::new(n as f64, 0.0));
        for r in 0..2 {
            for col in 0..2 {
                assert!((h[(r, col)] - expected[(r, col)]).norm() < 1e-12);
            }
        }
        let report = spectrum_bound_check(&c, 0.37).unwrap();
        assert!(report.within_bounds);
        assert!((report.max_eig - report.upper_bound).abs() < 1e-10);
    }

    #[test]
    fn single_round_identity_gives_h() {
        let g = qubit_z();
        let ident = ComplexMatrix::identity(2);
        let c = SequentialCircuit::new(g.clone(), vec![ident.clone(), ident], 1).unwrap();
        let h = sequential_generator(&c, 1.1).unwrap();
        for r in 0..2 {
            for col in 0..2 {
                assert!((h[(r, col)] - g.matrix()[(r, col)]).norm() < 1e-12);
            }
        }
    }

    /// Finite-difference oracle: `i (dW/dphi) W^dag` by central differences.
    fn finite_difference_generator(c: &SequentialCircuit<f64>, phi: f64) -> ComplexMatrix<f64> {
        let step = 1e-5;
        let w_plus = c.w_unitary(phi + step);
        let w_minus = c.w_unitary(phi - step);
        let dim = w_plus.dim();
        let mut dw = ComplexMatrix::zeros(dim);
        for r in 0..dim {
            for col in 0..dim {
                dw[(r, col)] = (w_plus[(r, col)] - w_minus[(r, col)])
                    * Complex::new(1.0 / (2.0 * step), 0.0);
            }
        }
        dw.mul(&c.w_unitary(phi).adjoint())
            .unwrap()
            .scale(Complex::new(0.0, 1.0))
    }

    #[test]
    fn sequential_generator_matches_finite_difference() {
        for seed in [2u64, 9, 14] {
            let g = qubit_z();
            let c = SequentialCircuit::random(g, 3, 2, seed).unwrap();
            let phi = 0.42;
            let h = sequential_generator(&c, phi).unwrap();
            let fd = finite_difference_generator(&c, phi);
            for r in 0..4 {
                for col in 0..4 {
                    assert!(
                        (h[(r, col)] - fd[(r, col)]).norm() < 1e-4,
                        "seed {seed} entry ({r},{col})"
                    );
                }
            }
            let report = spectrum_bound_check(&c, phi).unwrap();
            assert!(report.within_bounds, "seed {seed}");
            // eigenvalues of the finite-difference construction agree too
            let h_eigs = eigensystem(&h).unwrap();
            let fd_sym = fd
                .add(&fd.adjoint())
                .unwrap()
                .scale(Complex::new(0.5, 0.0));
            let fd_eigs = eigensystem(&fd_sym).unwrap();
            for (a, b) in h_eigs.eigenvalues().iter().zip(fd_eigs.eigenvalues()) {
                assert!((a - b).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn every_term_has_the_probe_spectrum() {
        let g = Generator::new(random_hermitian::<f64>(2, 33)).unwrap();
        let base: Vec<f64> = g.eigen().eigenvalues().to_vec();
        let c = SequentialCircuit::random(g, 4, 2, 91).unwrap();
        for term in sequential_generator_terms(&c, 0.8).unwrap() {
            let eig = eigensystem(&term).unwrap();
            // probe (x) ancilla doubles each probe eigenvalue's multiplicity
            let got = eig.eigenvalues();
            for (i, lambda) in base.iter().enumerate() {
                for rep in 0..2 {
                    assert!((got[2 * i + rep] - lambda).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn swap_interleave_stays_inside_the_envelope() {
        // V_1 swaps the extremal eigenvectors of a qubit generator
        let g = qubit_z();
        let swap = ComplexMatrix::from_entries(
            2,
            vec![
                Complex::new(0.0, 0.0),
                Complex::new(1.0, 0.0),
                Complex::new(1.0, 0.0),
                Complex::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let ident = ComplexMatrix::identity(2);
        let c = SequentialCircuit::new(g, vec![ident.clone(), swap, ident], 1).unwrap();
        let report = spectrum_bound_check(&c, 0.6).unwrap();
        assert!(report.within_bounds);
    }

    #[test]
    fn random_circuit_ensemble_respects_spectrum_bounds() {
        let mut rng = DetRng::from_seed_u64(7);
        for trial in 0u64..25 {
            let g = qubit_z();
            let c = SequentialCircuit::random(g, 4, 2, 5000 + trial).unwrap();
            let phi: f64 = rng.uniform::<f64>() * 2.0;
            assert!(spectrum_bound_check(&c, phi).unwrap().within_bounds);
        }
    }

    #[test]
    fn non_unitary_interleave_is_rejected() {
        let g = qubit_z();
        let bad = ComplexMatrix::diagonal(&[0.5f64, 1.0]);
        let err = SequentialCircuit::new(g, vec![ComplexMatrix::identity(2), bad], 1);
        assert!(matches!(err, Err(Error::NonUnitaryInterleave { index: 1, .. })));
    }
}
