//! The `check` subcommand: a fast self-test of the crate's core invariants.

use crate::error::Result;
use crate::estimation::{
    bound_cc, bound_qc, qfi_pure, uncertainty_relation_check, QFI_IDENTITY_TOLERANCE,
};
use crate::genspec::{delta_h, Generator, SequentialCircuit};
use crate::harness::report::{csv_string, json_string, parse_json};
use crate::harness::{run_sweep, GeneratorSpec, SweepConfig};
use crate::protocols::{
    run_ghz_qc, run_ramsey_cc, GhzPath, OperatingPointPolicy, Protocol, StrategyConfig,
};
use crate::qcore::{mix_seed, phase_unitary, random_hermitian, ComplexMatrix, StateVector};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name,
        passed,
        detail,
    }
}

/// Run the whole invariant suite. Deterministic per seed.
pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        unitarity_and_group_law(seed),
        normalization_under_evolution(seed),
        qfi_cramer_rao_identity(seed),
        bound_identity(),
        spectrum_bounds(seed),
        uncertainty_floor(seed),
        fast_path_equivalence(seed),
        report_roundtrip(seed)?,
    ])
}

fn unitarity_and_group_law(seed: u64) -> CheckOutcome {
    let mut worst = 0.0f64;
    for trial in 0..12 {
        let dim = 2 + (trial % 3);
        let h = random_hermitian::<f64>(dim, mix_seed(seed, 100 + trial as u64));
        let (p1, p2) = (0.7, -0.4);
        let u1 = phase_unitary(&h, p1).unwrap();
        let u2 = phase_unitary(&h, p2).unwrap();
        let both = phase_unitary(&h, p1 + p2).unwrap();
        worst = worst.max(u1.unitarity_error());
        let prod = u1.mul(&u2).unwrap();
        for r in 0..dim {
            for c in 0..dim {
                worst = worst.max((prod[(r, c)] - both[(r, c)]).norm());
            }
        }
        let inverse = phase_unitary(&h, -p1).unwrap();
        let id = u1.mul(&inverse).unwrap();
        let ident = ComplexMatrix::identity(dim);
        for r in 0..dim {
            for c in 0..dim {
                worst = worst.max((id[(r, c)] - ident[(r, c)]).norm());
            }
        }
    }
    outcome(
        "unitarity-group-law",
        worst < 1e-9,
        format!("worst deviation {worst:.3e} (tolerance 1e-9)"),
    )
}

fn normalization_under_evolution(seed: u64) -> CheckOutcome {
    let mut worst = 0.0f64;
    for trial in 0..12 {
        let dim = 2 + (trial % 3);
        let h = random_hermitian::<f64>(dim, mix_seed(seed, 200 + trial as u64));
        let u = phase_unitary(&h, 0.9).unwrap();
        let psi = StateVector::random(dim, mix_seed(seed, 300 + trial as u64));
        let out = crate::qcore::apply(&u, &psi).unwrap();
        worst = worst.max((out.norm() - 1.0).abs());
    }
    outcome(
        "state-normalization",
        worst < 1e-10,
        format!("worst |norm - 1| = {worst:.3e} (tolerance 1e-10)"),
    )
}

fn qfi_cramer_rao_identity(seed: u64) -> CheckOutcome {
    let g = Generator::new(ComplexMatrix::diagonal(&[-0.5, 0.5])).unwrap();
    let nu = 10_000u64;
    let mut worst = 0.0f64;
    for trial in 0..40 {
        let psi = StateVector::random(8, mix_seed(seed, 400 + trial));
        let qfi = qfi_pure(&psi, &g, 3).unwrap();
        let dh = delta_h(&psi, &g, 3).unwrap();
        if dh < 1e-9 {
            continue;
        }
        let via_qfi = 1.0 / ((nu as f64) * qfi).sqrt();
        let via_dh = 1.0 / (2.0 * (nu as f64).sqrt() * dh);
        worst = worst.max((via_qfi - via_dh).abs());
    }
    outcome(
        "qfi-cramer-rao-identity",
        worst < QFI_IDENTITY_TOLERANCE,
        format!(
            "worst |1/sqrt(nu qfi) - 1/(2 sqrt(nu) dh)| = {worst:.3e} (tolerance {QFI_IDENTITY_TOLERANCE:e})"
        ),
    )
}

fn bound_identity() -> CheckOutcome {
    let mut worst = 0.0f64;
    for &n in &[1u64, 2, 10, 100, 1024] {
        for &nu in &[1u64, 10, 10_000] {
            for &gap in &[0.5f64, 1.0, 2.0] {
                let lhs = bound_qc(n, nu, gap);
                let rhs = bound_cc(n, nu, gap) / (n as f64).sqrt();
                worst = worst.max((lhs - rhs).abs() / lhs);
            }
        }
    }
    outcome(
        "bound-identity",
        worst < 1e-12,
        format!("worst relative |qc - cc/sqrt(N)| = {worst:.3e}"),
    )
}

fn spectrum_bounds(seed: u64) -> CheckOutcome {
    let g = Generator::new(ComplexMatrix::diagonal(&[-0.5, 0.5])).unwrap();
    let mut all_within = true;
    let mut count = 0usize;
    for trial in 0..25u64 {
        let circuit = SequentialCircuit::random(g.clone(), 4, 2, mix_seed(seed, 500 + trial)).unwrap();
        let report = crate::genspec::spectrum_bound_check(&circuit, 0.3 + 0.01 * trial as f64).unwrap();
        all_within &= report.within_bounds;
        count += 1;
    }
    outcome(
        "sequential-spectrum-bounds",
        all_within,
        format!("{count} random circuits inside [N lambda_min, N lambda_max]"),
    )
}

fn uncertainty_floor(seed: u64) -> CheckOutcome {
    let g = Generator::new(ComplexMatrix::diagonal(&[-0.5, 0.5])).unwrap();
    let nu = 4_000u64;
    let ramsey = StrategyConfig::new(Protocol::RamseyCC, g.clone(), 6, nu, 0.3, mix_seed(seed, 600));
    let ghz = StrategyConfig::new(Protocol::GhzQC, g.clone(), 6, nu, 0.3, mix_seed(seed, 601));
    let r1 = run_ramsey_cc(&ramsey).unwrap();
    let r2 = run_ghz_qc(&ghz).unwrap();
    let dh_product = (6f64).sqrt() * g.gap() / 2.0;
    let dh_ghz = 6.0 * g.gap() / 2.0;
    let u1 = uncertainty_relation_check(r1.delta_phi_empirical, dh_product, nu);
    let u2 = uncertainty_relation_check(r2.delta_phi_empirical, dh_ghz, nu);
    let passed = u1.satisfied_with_slack && u2.satisfied_with_slack && u2.slack_factor <= 2.0;
    outcome(
        "uncertainty-floor",
        passed,
        format!(
            "product slack {:.3}, entangled slack {:.3} (floor 0.9, entangled cap 2.0)",
            u1.slack_factor, u2.slack_factor
        ),
    )
}

fn fast_path_equivalence(seed: u64) -> CheckOutcome {
    let g = Generator::new(ComplexMatrix::diagonal(&[-0.5, 0.5])).unwrap();
    let base = StrategyConfig::new(Protocol::GhzQC, g, 6, 1_500, 0.21, mix_seed(seed, 700))
        .with_policy(OperatingPointPolicy::MaxSlope);
    let sv = run_ghz_qc(&base.clone().with_ghz_path(GhzPath::Statevector)).unwrap();
    let fast = run_ghz_qc(&base.with_ghz_path(GhzPath::Analytic)).unwrap();
    let identical = sv.phi_estimates == fast.phi_estimates
        && sv.delta_phi_empirical == fast.delta_phi_empirical
        && sv.u_phi_applications == fast.u_phi_applications;
    outcome(
        "ghz-fast-path-equivalence",
        identical,
        "statevector and analytic engines produced identical outcome streams".into(),
    )
}

fn report_roundtrip(seed: u64) -> Result<CheckOutcome> {
    let cfg = SweepConfig {
        strategies: vec!["ghz-qc".into()],
        n_values: vec![2, 4, 8],
        nu: 400,
        phi_true: None,
        generator: GeneratorSpec::default(),
        seed: mix_seed(seed, 800),
    };
    let report = run_sweep(&cfg)?;
    let json = json_string(&report)?;
    let back = parse_json(&json)?;
    let json_ok = back == report;

    let csv = csv_string(&report);
    let mut csv_ok = csv.lines().next() == Some("strategy,N,nu,delta_phi,bound,ratio");
    for (line, cell) in csv.lines().skip(1).zip(&report.cells) {
        let fields: Vec<&str> = line.split(',').collect();
        let delta: f64 = fields[3].parse().unwrap_or(f64::NAN);
        csv_ok &= delta.to_bits() == cell.delta_phi.unwrap_or(f64::NAN).to_bits();
    }
    Ok(outcome(
        "report-roundtrip",
        json_ok && csv_ok,
        format!("json identical: {json_ok}, csv floats bit-exact: {csv_ok}"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_suite_is_green() {
        let outcomes = run_all(42).unwrap();
        assert_eq!(outcomes.len(), 8);
        for o in &outcomes {
            assert!(o.passed, "{} failed: {}", o.name, o.detail);
        }
    }
}
