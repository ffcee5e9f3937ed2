//! Statistical machinery: the slope-normalized error functional, error
//! propagation, the closed-form precision bounds, the uncertainty-relation
//! check, and a quantum-Fisher-information oracle for pure states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genspec::{delta_h, Generator};
use crate::qcore::StateVector;
use crate::scalar::Scalar;

/// Which closed-form bound an error value is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    CcCq,
    QcQq,
    Sequential,
    CramerRao,
}

/// A finished error evaluation: the reported error, the estimator mean and
/// slope used to normalize it, and the applicable bound.
#[derive(Debug, Clone)]
pub struct ErrorEvaluation<T> {
    pub delta_phi: T,
    pub mean_estimate: T,
    pub slope_d_mean_d_phi: T,
    pub nu: u64,
    pub bound: T,
    pub bound_kind: BoundKind,
}

impl<T: Scalar> ErrorEvaluation<T> {
    /// Evaluate the slope-normalized error of raw estimator samples against a
    /// bound. The slope usually comes from [`slope_of_mean`].
    pub fn from_samples(
        samples: &[T],
        phi_true: T,
        slope: T,
        bound: T,
        bound_kind: BoundKind,
    ) -> Result<Self> {
        let dphi = delta_phi(samples, phi_true, slope)?;
        let mean = samples.iter().copied().fold(T::zero(), |a, b| a + b)
            / T::of(samples.len() as f64);
        Ok(Self {
            delta_phi: dphi,
            mean_estimate: mean,
            slope_d_mean_d_phi: slope,
            nu: samples.len() as u64,
            bound,
            bound_kind,
        })
    }

    pub fn bound_ratio(&self) -> T {
        self.delta_phi / self.bound
    }
}

/// Root-mean-square error of slope-normalized estimator samples around the
/// true phase: `sqrt(mean((sample/|slope| - phi_true)^2))`.
///
/// The slope is the derivative of the estimator mean with respect to the true
/// phase; it converts a (possibly biased) estimator into phase units. For an
/// unbiased estimator the slope is 1 and this is the plain RMS error.
pub fn delta_phi<T: Scalar>(samples: &[T], phi_true: T, slope: T) -> Result<T> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    let floor = T::of(1e-9);
    if slope.abs() <= floor {
        return Err(Error::ZeroSlope {
            slope: slope.abs().to_f64().unwrap_or(0.0),
        });
    }
    let inv = T::one() / slope.abs();
    let sum: T = samples
        .iter()
        .map(|&s| {
            let d = s * inv - phi_true;
            d * d
        })
        .fold(T::zero(), |a, b| a + b);
    Ok((sum / T::of(samples.len() as f64)).sqrt())
}

/// Central finite difference of a Monte Carlo mean-estimate channel,
/// `(runner(phi + step) - runner(phi - step)) / (2 step)`, with common random
/// numbers: both sides run on the same seed so sampling noise cancels.
pub fn slope_of_mean<T, F>(runner: F, phi: T, step: T, seed: u64) -> Result<T>
where
    T: Scalar,
    F: Fn(T, u64) -> Result<T>,
{
    if step <= T::zero() {
        return Err(Error::InvalidInput("finite-difference step must be positive".into()));
    }
    let plus = runner(phi + step, seed)?;
    let minus = runner(phi - step, seed)?;
    Ok((plus - minus) / (step + step))
}

/// Error propagation through a signal channel: the standard error of the
/// inverted estimate after `nu` repetitions,
/// `sqrt(variance) / (sqrt(nu) |d<signal>/d phi|)`.
pub fn error_propagation<T: Scalar>(
    _expectation: T,
    variance: T,
    d_expectation_d_phi: T,
    nu: u64,
) -> Result<T> {
    if variance < T::zero() {
        return Err(Error::InvalidInput("negative variance".into()));
    }
    if nu == 0 {
        return Err(Error::InvalidInput("nu must be >= 1".into()));
    }
    if d_expectation_d_phi.abs() <= T::of(1e-12) {
        return Err(Error::ZeroDerivative);
    }
    Ok(variance.sqrt() / (T::of(nu as f64).sqrt() * d_expectation_d_phi.abs()))
}

/// Separable-preparation (CC/CQ) bound `1 / (sqrt(nu N) gap)`.
pub fn bound_cc<T: Scalar>(n: u64, nu: u64, gap: T) -> T {
    T::one() / ((T::of(nu as f64) * T::of(n as f64)).sqrt() * gap)
}

/// Entangled-preparation (QC/QQ) bound `1 / (sqrt(nu) N gap)`.
pub fn bound_qc<T: Scalar>(n: u64, nu: u64, gap: T) -> T {
    T::one() / (T::of(nu as f64).sqrt() * T::of(n as f64) * gap)
}

/// Multiround bound; identical to [`bound_qc`].
pub fn bound_sequential<T: Scalar>(n: u64, nu: u64, gap: T) -> T {
    bound_qc(n, nu, gap)
}

/// Outcome of checking `delta_phi * delta_h >= 1/(2 sqrt(nu))`.
#[derive(Debug, Clone)]
pub struct UncertaintyReport<T> {
    pub lhs: T,
    pub rhs: T,
    /// Ratio `lhs / rhs`; 1 is saturation, large values mean a loose protocol.
    pub slack_factor: T,
    pub satisfied_with_slack: bool,
}

pub const UNCERTAINTY_SLACK: f64 = 0.1;

/// Tolerance for the algebraic identity `1/sqrt(nu QFI) = 1/(2 sqrt(nu) delta_h)`.
pub const QFI_IDENTITY_TOLERANCE: f64 = 1e-12;

/// Check the uncertainty-relation floor with the default 10% sampling slack.
/// A product more than 10% below the floor flags a simulation bug.
pub fn uncertainty_relation_check<T: Scalar>(dphi: T, dh: T, nu: u64) -> UncertaintyReport<T> {
    let lhs = dphi * dh;
    let rhs = T::one() / (T::of(2.0) * T::of(nu as f64).sqrt());
    let slack_factor = lhs / rhs;
    UncertaintyReport {
        lhs,
        rhs,
        slack_factor,
        satisfied_with_slack: lhs >= (T::one() - T::of(UNCERTAINTY_SLACK)) * rhs,
    }
}

/// Quantum Fisher information of a pure `N`-probe state under collective
/// phase evolution: `4 (delta_h)^2`. The per-repetition Cramer-Rao limit
/// `1/sqrt(nu QFI)` is then identically `1/(2 sqrt(nu) delta_h)`.
pub fn qfi_pure<T: Scalar>(psi: &StateVector<T>, g: &Generator<T>, n: usize) -> Result<T> {
    let dh = delta_h(psi, g, n)?;
    Ok(T::of(4.0) * dh * dh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genspec::{extremal_superposition, ghz_state};
    use crate::qcore::ComplexMatrix;

    fn qubit_z() -> Generator<f64> {
        Generator::new(ComplexMatrix::diagonal(&[-0.5, 0.5])).unwrap()
    }

    #[test]
    fn perfect_estimator_has_zero_error() {
        let samples = vec![0.7f64; 10];
        assert_eq!(delta_phi(&samples, 0.7, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_spread_gives_epsilon() {
        let eps = 1e-3f64;
        let samples = [0.5 + eps, 0.5 - eps];
        let d = delta_phi(&samples, 0.5, 1.0).unwrap();
        assert!((d - eps).abs() < 1e-15);
    }

    #[test]
    fn biased_estimator_is_normalized_by_slope() {
        // estimator mean 2 phi, so slope 2; spread eps maps to eps/2
        let phi = 0.31;
        let eps = 4e-3f64;
        let samples = [2.0 * phi + eps, 2.0 * phi - eps];
        let d = delta_phi(&samples, phi, 2.0).unwrap();
        assert!((d - eps / 2.0).abs() < 1e-15);
    }

    #[test]
    fn delta_phi_guards() {
        assert!(matches!(
            delta_phi(&[0.1f64], 0.1, 1.0),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(matches!(
            delta_phi(&[0.1f64, 0.2], 0.1, 1e-12),
            Err(Error::ZeroSlope { .. })
        ));
    }

    #[test]
    fn slope_of_unbiased_linear_channel_is_one() {
        // deterministic pseudo-noise shared through the seed cancels exactly
        let runner = |phi: f64, seed: u64| -> Result<f64> {
            let noise = (seed as f64).sin() * 0.05;
            Ok(phi + noise)
        };
        let slope = slope_of_mean(runner, 0.4, 1e-4, 99).unwrap();
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn slope_of_constant_channel_is_zero() {
        let runner = |_phi: f64, _seed: u64| -> Result<f64> { Ok(0.123) };
        let slope = slope_of_mean(runner, 0.4, 1e-4, 1).unwrap();
        assert_eq!(slope, 0.0);
        assert!(matches!(
            delta_phi(&[0.1, 0.2], 0.1, slope),
            Err(Error::ZeroSlope { .. })
        ));
    }

    #[test]
    fn ghz_channel_propagates_to_the_qc_bound() {
        // <X^N> = cos(N phi gap): propagated error is 1/(sqrt(nu) N gap) off nodes
        let (n, nu, gap) = (8u64, 10_000u64, 1.0f64);
        let mut previous: Option<f64> = None;
        for k in 1..40 {
            let phi = 0.01 + k as f64 * 0.0075;
            let theta = n as f64 * phi * gap;
            if theta.sin().abs() < 1e-3 {
                continue;
            }
            let expectation = theta.cos();
            let variance = theta.sin() * theta.sin();
            let deriv = -(n as f64) * gap * theta.sin();
            let d = error_propagation(expectation, variance, deriv, nu).unwrap();
            let target = bound_qc(n, nu, gap);
            assert!((d - target).abs() < 1e-12, "phi {phi}: {d} vs {target}");
            if let Some(prev) = previous {
                assert!((d - prev).abs() < 1e-12, "phi-dependence detected");
            }
            previous = Some(d);
        }
    }

    #[test]
    fn error_propagation_edge_cases() {
        assert_eq!(error_propagation(0.5, 0.0, 1.0, 10).unwrap(), 0.0);
        assert!(matches!(
            error_propagation(1.0, 0.3, 0.0, 10),
            Err(Error::ZeroDerivative)
        ));
    }

    #[test]
    fn bound_values_and_identities() {
        assert!((bound_cc(100, 1, 1.0f64) - 0.1).abs() < 1e-15);
        assert!((bound_qc(100, 1, 1.0f64) - 0.01).abs() < 1e-15);
        assert_eq!(bound_cc(1, 7, 2.0f64), bound_qc(1, 7, 2.0));
        for &(n, nu) in &[(3u64, 5u64), (10, 100), (64, 10_000)] {
            for &gap in &[0.5f64, 1.0, 2.0] {
                let ratio = bound_qc(n, nu, gap) * (n as f64).sqrt() / bound_cc(n, nu, gap);
                assert!((ratio - 1.0).abs() < 1e-12);
                assert_eq!(bound_sequential(n, nu, gap), bound_qc(n, nu, gap));
                // gap enters inversely
                assert!((bound_cc(n, nu, 2.0 * gap) * 2.0 - bound_cc(n, nu, gap)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn uncertainty_check_saturating_pair() {
        let nu = 400u64;
        let dh = 2.5f64;
        let dphi = 1.0 / (2.0 * (nu as f64).sqrt() * dh);
        let report = uncertainty_relation_check(dphi, dh, nu);
        assert!(report.satisfied_with_slack);
        assert!((report.slack_factor - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uncertainty_check_flags_sub_bound_results() {
        let nu = 400u64;
        let dh = 2.5f64;
        let dphi = 0.85 / (2.0 * (nu as f64).sqrt() * dh);
        let report = uncertainty_relation_check(dphi, dh, nu);
        assert!(!report.satisfied_with_slack);
    }

    #[test]
    fn qfi_of_ghz_and_product_states() {
        let g = qubit_z();
        let ghz = ghz_state(&g, 5).unwrap();
        let qfi = qfi_pure(&ghz, &g, 5).unwrap();
        assert!((qfi - 25.0).abs() < 1e-8, "qfi {qfi}");

        let product = extremal_superposition(&g).unwrap().tensor_power(5).unwrap();
        let qfi_p = qfi_pure(&product, &g, 5).unwrap();
        assert!((qfi_p - 5.0).abs() < 1e-9, "qfi {qfi_p}");

        let eigen = g.vec_max().tensor_power(5).unwrap();
        assert!(qfi_pure(&eigen, &g, 5).unwrap() < 1e-18);
    }

    #[test]
    fn evaluation_packages_delta_phi_against_its_bound() {
        // per-repetition estimates around phi with spread ~1/(sqrt(N) gap):
        // the evaluation's ratio to the per-repetition bound is ~1
        let phi = 0.8;
        let samples: Vec<f64> = (0..2000)
            .map(|k| phi + 0.05 * ((k as f64 * 0.7129).sin()))
            .collect();
        let eval = ErrorEvaluation::from_samples(&samples, phi, 1.0, 0.03, BoundKind::CramerRao)
            .unwrap();
        assert!((eval.mean_estimate - phi).abs() < 1e-3);
        assert!(eval.delta_phi > 0.0 && eval.bound_ratio() > 1.0);
        assert_eq!(eval.nu, 2000);
    }

    #[test]
    fn cramer_rao_identity_for_random_states() {
        let g = qubit_z();
        let nu = 1234u64;
        for seed in 0u64..20 {
            let psi = StateVector::random(8, seed);
            let qfi = qfi_pure(&psi, &g, 3).unwrap();
            let dh = delta_h(&psi, &g, 3).unwrap();
            if dh < 1e-12 {
                continue;
            }
            let via_qfi = 1.0 / ((nu as f64) * qfi).sqrt();
            let via_dh = 1.0 / (2.0 * (nu as f64).sqrt() * dh);
            assert!((via_qfi - via_dh).abs() < 1e-12);
        }
    }
}
