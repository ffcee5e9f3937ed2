//! Digit-by-digit full-phase recovery.
//!
//! The fringe protocols resolve a phase only within one monotonic branch; to
//! recover every digit of `y = phi gap / 2pi` in base `b`, stage `j` runs the
//! interferometer with `b^j` phase applications per repetition (a `b^j`-probe
//! entangled register or `b^j` sequential passes), measuring both fringe
//! quadratures. Stage `j` reads the wrapped fraction `frac(b^j y)`; stages are
//! then stitched finest-to-coarsest: each coarser digit is the likelihood
//! argmax over the `b` candidates conditioned on the already-fixed finer
//! digits, which only needs per-stage accuracy ~`1/(2b)` rather than exact
//! digit-boundary resolution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{bound_qc, BoundKind};
use crate::genspec::{extremal_superposition, ghz_state};
use crate::pool;
use crate::protocols::{EstimationResult, Protocol, StrategyConfig};
use crate::qcore::{mix_seed, DetRng};
use crate::scalar::Scalar;

/// How each digit stage spends its `b^j` phase applications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum DigitEngine {
    /// Single probe, `b^j` sequential passes. No register-size cap.
    #[default]
    Sequential,
    /// Entangled register of `b^j` probes (statevector; capped).
    Ghz,
}

/// Total phase applications allowed across a digit plan.
const MAX_TOTAL_APPLICATIONS: u64 = 1 << 30;

/// Hypothesis probabilities are clamped away from {0, 1} before taking logs.
const LIKELIHOOD_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DigitStageReport<T> {
    /// Digit index `j` (weight `b^-(j+1)` in `y`).
    pub index: u32,
    /// Phase applications per repetition at this stage, `b^j`.
    pub probes_per_repetition: u64,
    pub nu_cos: u64,
    pub nu_sin: u64,
    pub successes_cos: u64,
    pub successes_sin: u64,
    /// Wrapped fraction estimate `frac(b^j y)` from the two quadratures.
    pub fraction_estimate: T,
    pub digit: u32,
    /// Log10 of the top-two candidate likelihood ratio.
    pub log10_margin: T,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DigitReport<T> {
    pub base: u32,
    pub stages: Vec<DigitStageReport<T>>,
    /// Digits of `y` in the given base, coarsest first.
    pub digits: Vec<u32>,
    /// Assembled estimate of `y = phi gap / 2pi`.
    pub assembled_fraction: T,
    pub assembled_phi: T,
    /// Probes (phase applications) spent per repetition batch, summed over
    /// stages: `sum_j b^j`.
    pub probes_per_batch: u64,
    /// Delta-method standard deviation of the assembled fraction.
    pub fraction_std: T,
}

struct StageCounts {
    nu_cos: u64,
    nu_sin: u64,
    successes_cos: u64,
    successes_sin: u64,
    uses: u64,
}

/// Run the digit-by-digit protocol described by `cfg` (`digit_base`,
/// `digit_count`, `digit_engine`, `nu` repetitions per digit).
pub fn run_digit_by_digit<T: Scalar>(cfg: &StrategyConfig<T>) -> Result<EstimationResult<T>> {
    if cfg.protocol != Protocol::DigitByDigit {
        return Err(Error::InvalidInput("config is not a DigitByDigit config".into()));
    }
    if cfg.digit_base < 2 {
        return Err(Error::InvalidInput("digit base must be >= 2".into()));
    }
    if cfg.digit_count < 1 {
        return Err(Error::InvalidInput("digit count must be >= 1".into()));
    }
    if cfg.nu < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: cfg.nu as usize,
        });
    }
    let g = &cfg.generator;
    if g.gap_is_zero() {
        return Err(Error::ZeroGap);
    }
    let two_pi = T::of(2.0) * T::PI();
    let y_true = cfg.phi_true * g.gap() / two_pi;
    if y_true < T::zero() || y_true >= T::one() {
        return Err(Error::InvalidInput(
            "digit recovery needs phi * gap in [0, 2pi): rescale the prior".into(),
        ));
    }
    let base = cfg.digit_base as u64;
    let stages_n: Vec<u64> = (0..cfg.digit_count)
        .map(|j| {
            base.checked_pow(j)
                .ok_or_else(|| Error::InvalidInput("digit plan overflows u64 probes".into()))
        })
        .collect::<Result<_>>()?;
    let total_applications: u64 = stages_n
        .iter()
        .map(|n| n.checked_mul(cfg.nu))
        .sum::<Option<u64>>()
        .ok_or_else(|| Error::InvalidInput("digit plan overflows u64 applications".into()))?;
    if total_applications > MAX_TOTAL_APPLICATIONS {
        return Err(Error::InvalidInput(format!(
            "digit plan needs {total_applications} phase applications, above the {MAX_TOTAL_APPLICATIONS} cap"
        )));
    }

    let nu_sin = cfg.nu / 2;
    let nu_cos = cfg.nu - nu_sin;
    let mut stage_reports: Vec<DigitStageReport<T>> = Vec::with_capacity(stages_n.len());
    let mut total_uses = 0u64;
    for (j, &n_j) in stages_n.iter().enumerate() {
        let stage_seed = mix_seed(cfg.seed, j as u64);
        let counts = run_stage(cfg, n_j, nu_cos, nu_sin, stage_seed)?;
        total_uses += counts.uses;
        let cos_hat: T = recentred(counts.successes_cos, counts.nu_cos);
        let sin_hat: T = recentred(counts.successes_sin, counts.nu_sin);
        let mut fraction = sin_hat.atan2(cos_hat) / two_pi;
        if fraction < T::zero() {
            fraction += T::one();
        }
        stage_reports.push(DigitStageReport {
            index: j as u32,
            probes_per_repetition: n_j,
            nu_cos: counts.nu_cos,
            nu_sin: counts.nu_sin,
            successes_cos: counts.successes_cos,
            successes_sin: counts.successes_sin,
            fraction_estimate: fraction,
            digit: 0,
            log10_margin: T::zero(),
        });
    }

    // assemble finest-to-coarsest
    let l = stage_reports.len();
    let b_t = T::of(cfg.digit_base as f64);
    let mut digits = vec![0u32; l];
    let finest = &stage_reports[l - 1];
    let mut tail = finest.fraction_estimate;
    digits[l - 1] = ((tail * b_t).floor().to_f64().unwrap_or(0.0) as u32).min(cfg.digit_base - 1);
    {
        // margin of the last digit against uninformative-tail hypotheses
        let half = T::of(0.5);
        let (_, margin) = best_candidate(finest, cfg.digit_base, half)?;
        let report = &mut stage_reports[l - 1];
        report.digit = digits[l - 1];
        report.log10_margin = margin;
        if margin < T::one() {
            return Err(Error::DigitAmbiguous {
                digit: l - 1,
                ratio: T::of(10.0).powf(margin).to_f64().unwrap_or(0.0),
            });
        }
    }
    for j in (0..l - 1).rev() {
        let (digit, margin) = best_candidate(&stage_reports[j], cfg.digit_base, tail)?;
        if margin < T::one() {
            return Err(Error::DigitAmbiguous {
                digit: j,
                ratio: T::of(10.0).powf(margin).to_f64().unwrap_or(0.0),
            });
        }
        digits[j] = digit;
        tail = (T::of(digit as f64) + tail) / b_t;
        let report = &mut stage_reports[j];
        report.digit = digit;
        report.log10_margin = margin;
    }
    let assembled_fraction = tail;
    let assembled_phi = assembled_fraction * two_pi / g.gap();

    // delta-method spread of the assembled fraction, dominated by the finest stage
    let finest = &stage_reports[l - 1];
    let fraction_std = {
        let c = recentred::<T>(finest.successes_cos, finest.nu_cos);
        let s = recentred::<T>(finest.successes_sin, finest.nu_sin);
        let var_c = bernoulli_mean_variance(finest.successes_cos, finest.nu_cos);
        let var_s = bernoulli_mean_variance(finest.successes_sin, finest.nu_sin);
        let r2 = (c * c + s * s).max(T::of(1e-12));
        let var_f = (s * s * var_c + c * c * var_s) / (r2 * r2 * two_pi * two_pi);
        var_f.sqrt() / T::of(finest.probes_per_repetition as f64)
    };
    let delta_phi_empirical = fraction_std * two_pi / g.gap();

    let probes_per_batch: u64 = stages_n.iter().sum();
    let finest_n = stages_n[l - 1];
    let report = DigitReport {
        base: cfg.digit_base,
        digits,
        assembled_fraction,
        assembled_phi,
        probes_per_batch,
        fraction_std,
        stages: stage_reports,
    };
    let finest_theta = two_pi * report.stages[l - 1].fraction_estimate;
    Ok(EstimationResult {
        phi_estimates: Vec::new(),
        delta_phi_empirical,
        mean_estimate: assembled_phi,
        signal_mean: finest_theta.cos(),
        signal_variance: T::one() - finest_theta.cos() * finest_theta.cos(),
        signal_slope: -T::of(finest_n as f64) * g.gap() * finest_theta.sin(),
        u_phi_applications: total_uses,
        theoretical_bound: bound_qc(finest_n, cfg.nu, g.gap()),
        bound_kind: BoundKind::QcQq,
        clipped_repetitions: 0,
        mean_clipped: false,
        echo: cfg.clone(),
        digit_report: Some(report),
    })
}

fn recentred<T: Scalar>(successes: u64, trials: u64) -> T {
    T::of(2.0) * (T::of(successes as f64) / T::of(trials as f64)) - T::one()
}

/// Variance of the recentred success mean `2 k/nu - 1`.
fn bernoulli_mean_variance<T: Scalar>(successes: u64, trials: u64) -> T {
    let p = T::of(successes as f64) / T::of(trials as f64);
    T::of(4.0) * p * (T::one() - p) / T::of(trials as f64)
}

/// Run both quadratures of one digit stage; `n_j` phase applications per
/// repetition. The success probability is `(1 + cos theta)/2` for the cosine
/// quadrature and `(1 + sin theta)/2` for the sine quadrature, realized by a
/// known `-pi/2` reference offset.
fn run_stage<T: Scalar>(
    cfg: &StrategyConfig<T>,
    n_j: u64,
    nu_cos: u64,
    nu_sin: u64,
    stage_seed: u64,
) -> Result<StageCounts> {
    let g = &cfg.generator;
    let u = g.phase_unitary(cfg.phi_true);
    let quarter_back = g.phase_unitary(-T::FRAC_PI_2() / g.gap());
    let mut successes = [0u64; 2];
    let mut uses = 0u64;
    for (quad, &nu_q) in [nu_cos, nu_sin].iter().enumerate() {
        let offset = if quad == 1 { Some(&quarter_back) } else { None };
        let outcomes: Vec<Result<(bool, u64)>> = match cfg.digit_engine {
            DigitEngine::Sequential => {
                let psi_in = extremal_superposition(g)?;
                pool::run_indexed(nu_q as usize, |rep| {
                    let rep_seed = mix_seed(stage_seed, (quad as u64) * cfg.nu + rep as u64);
                    let mut rng = DetRng::from_seed_u64(rep_seed);
                    let mut amps = psi_in.amplitudes().to_vec();
                    let mut rep_uses = 0u64;
                    for _ in 0..n_j {
                        amps = u.mul_vec(&amps);
                        rep_uses += 1;
                    }
                    if let Some(off) = offset {
                        amps = off.mul_vec(&amps);
                    }
                    let overlap = psi_in
                        .amplitudes()
                        .iter()
                        .zip(&amps)
                        .fold(num_complex::Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                            acc + a.conj() * *b
                        });
                    Ok((rng.bernoulli(overlap.norm_sqr()), rep_uses))
                })
            }
            DigitEngine::Ghz => {
                let n_sites = usize::try_from(n_j)
                    .map_err(|_| Error::InvalidInput("digit register too large".into()))?;
                let psi_in = ghz_state(g, n_sites)?;
                let d = g.dim();
                let x_obs = crate::protocols::exchange_observable(g);
                pool::run_indexed(nu_q as usize, |rep| {
                    let rep_seed = mix_seed(stage_seed, (quad as u64) * cfg.nu + rep as u64);
                    let mut rng = DetRng::from_seed_u64(rep_seed);
                    let mut state = psi_in.clone();
                    let mut rep_uses = 0u64;
                    for site in 0..n_sites {
                        state = state.apply_at_site(&u, site, d, n_sites)?;
                        rep_uses += 1;
                    }
                    if let Some(off) = offset {
                        state = state.apply_at_site(off, 0, d, n_sites)?;
                    }
                    let expectation =
                        crate::protocols::product_observable_expectation(&state, &x_obs, d, n_sites);
                    let p_plus = (T::one() + expectation) / T::of(2.0);
                    Ok((rng.bernoulli(p_plus), rep_uses))
                })
            }
        };
        for outcome in outcomes {
            let (success, rep_uses) = outcome?;
            if success {
                successes[quad] += 1;
            }
            uses += rep_uses;
        }
    }
    Ok(StageCounts {
        nu_cos,
        nu_sin,
        successes_cos: successes[0],
        successes_sin: successes[1],
        uses,
    })
}

/// Likelihood argmax over the `b` digit candidates for one stage, with the
/// already-assembled finer tail fixing each candidate's fraction hypothesis
/// `(d + tail)/b`. Returns the winner and the log10 margin over the runner-up.
fn best_candidate<T: Scalar>(
    stage: &DigitStageReport<T>,
    base: u32,
    tail: T,
) -> Result<(u32, T)> {
    let b_t = T::of(base as f64);
    let two_pi = T::of(2.0) * T::PI();
    let mut scored: Vec<(T, u32)> = (0..base)
        .map(|d| {
            let hypothesis = (T::of(d as f64) + tail) / b_t;
            let theta = two_pi * hypothesis;
            let ll = binomial_loglik(stage.successes_cos, stage.nu_cos, (T::one() + theta.cos()) / T::of(2.0))
                + binomial_loglik(stage.successes_sin, stage.nu_sin, (T::one() + theta.sin()) / T::of(2.0));
            (ll, d)
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite log-likelihoods"));
    let margin = (scored[0].0 - scored[1].0) / T::of(10.0).ln();
    Ok((scored[0].1, margin))
}

fn binomial_loglik<T: Scalar>(successes: u64, trials: u64, p: T) -> T {
    let clamp = T::of(LIKELIHOOD_CLAMP);
    let p = p.max(clamp).min(T::one() - clamp);
    T::of(successes as f64) * p.ln() + T::of((trials - successes) as f64) * (T::one() - p).ln()
}
