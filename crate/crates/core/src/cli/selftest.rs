use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::audit::{
    audit_approx_dp, audit_chtp, audit_dp, audit_testing_bound, chtp_converse_witness,
    chtp_params_from_dp,
};
use crate::bench::lemma_property_suite;
use crate::bounds::{
    contraction_sweep, mass_everywhere_sweep, packing_lower_bound, tv_mean_lower_bound,
    uniform_support_lower_bound, ContractionSweepConfig, MassSweepConfig,
};
use crate::prob::{kl_divergence, tv_distance, DiscreteChannel, FiniteDistribution};
use crate::rng::RngStream;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<SelftestCheck>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn labels(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

/// Random channel with some exact zeros; `spread` bounds the log-weight range
/// (infinite for arbitrary weights).
fn random_channel(rng: &mut ChaCha8Rng, spread: f64) -> Result<DiscreteChannel> {
    let alphabet = rng.random_range(2..=3);
    let n = rng.random_range(1..=2);
    let outputs = rng.random_range(2..=6);
    DiscreteChannel::from_fn(labels("x", alphabet), n, labels("t", outputs), |_| {
        let mut w: Vec<f64> = (0..outputs)
            .map(|_| {
                if spread.is_finite() {
                    (rng.random_range(0.0..spread)).exp()
                } else if rng.random_bool(0.2) {
                    0.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        if w.iter().all(|&v| v == 0.0) {
            w[0] = 1.0;
        }
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    })
}

type Outcome = Result<(bool, String)>;

fn testing_bound_equivalence(seed: u64, fault: bool) -> Outcome {
    let mut worst = 0.0f64;
    for i in 0..200 {
        let mut rng = RngStream::new(seed, i).rng();
        let q = random_channel(&mut rng, f64::INFINITY)?;
        let eps = rng.random_range(0.0..2.0);
        let a = audit_approx_dp(&q, eps, 0.0)?.tight_param;
        let mut b = audit_testing_bound(&q, eps, 0.0)?.tight_param;
        if fault {
            b += 1e-6;
        }
        worst = worst.max((a - b).abs());
    }
    Ok((
        worst <= 1e-9,
        format!("200 channels, max |δ − δ_test| = {worst:.2e}"),
    ))
}

fn chtp_forward(seed: u64) -> Outcome {
    let mut failures = 0;
    for i in 0..100 {
        let mut rng = RngStream::new(seed, i).rng();
        let q = random_channel(&mut rng, 0.1)?;
        let eps = audit_dp(&q, 0.2)?.tight_param;
        let (eps_ch, delta_ch) = chtp_params_from_dp(eps, 0.0)?;
        if !audit_chtp(&q, eps_ch, delta_ch)?.holds {
            failures += 1;
        }
    }
    Ok((
        failures == 0,
        format!("100 channels with ε ≤ 0.2, {failures} failed CHTP"),
    ))
}

fn chtp_converse(seed: u64) -> Outcome {
    let (mut tried, mut failures) = (0, 0);
    for i in 0..100 {
        let mut rng = RngStream::new(seed, i).rng();
        let q = random_channel(&mut rng, f64::INFINITY)?;
        let eps = rng.random_range(0.1..2.0);
        let tight = audit_approx_dp(&q, eps, 0.0)?.tight_param;
        if tight < 1e-6 {
            continue;
        }
        tried += 1;
        match chtp_converse_witness(&q, eps, tight / 2.0)? {
            Some(w) => {
                let m = w.masses;
                let direct = m.c_given_x / (m.b_given_x + m.c_given_x)
                    + m.b_given_x_prime / (m.b_given_x_prime + m.c_given_x_prime);
                if !(direct < 1.0 - w.eps_ch && (direct - w.error_sum).abs() < 1e-12) {
                    failures += 1;
                }
            }
            None => failures += 1,
        }
    }
    Ok((
        failures == 0 && tried > 0,
        format!("{tried} violating channels, {failures} without a verified witness"),
    ))
}

fn pinsker(seed: u64) -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..500 {
        let mut rng = RngStream::new(seed, i).rng();
        let k = rng.random_range(2..=6);
        let mut draw = || {
            let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
            FiniteDistribution::from_weights(labels("o", k), &w)
        };
        let (p, q) = (draw()?, draw()?);
        let gap = tv_distance(&p, &q)? - (kl_divergence(&p, &q)? / 2.0).sqrt();
        worst = worst.max(gap);
    }
    Ok((
        worst <= 1e-12,
        format!("500 pairs, max TV − √(KL/2) = {worst:.3e}"),
    ))
}

fn closed_forms() -> Outcome {
    let values = [
        (tv_mean_lower_bound(1.0, 2.0, 100, 0.1)?.value, 0.00625),
        (uniform_support_lower_bound(1.0, 100, 0.1)?, 0.003125),
        (packing_lower_bound(2, 0, 0.7, 0.0)?, 0.25),
    ];
    let worst = values
        .iter()
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
}

/// Runs the invariant suite. `inject_fault` perturbs the first check so the
/// suite must fail.
pub fn run_selftest(seed: u64, inject_fault: bool) -> SelftestReport {
    let lemma = |s: u64| {
        let r = lemma_property_suite(s);
        let ok = r
            .checks
            .iter()
            .filter(|c| c.bias_ok && c.variance_ok)
            .count();
        Ok((
            r.passed,
            format!("{ok}/{} configurations within 4·stderr", r.checks.len()),
        ))
    };
    let contraction = |s: u64| {
        let r = contraction_sweep(&ContractionSweepConfig::default(), s)?;
        Ok((
            r.passed(),
            format!(
                "{} instances, {} violations",
                r.instances,
                r.violations.len()
            ),
        ))
    };
    let mass = |s: u64| {
        let r = mass_everywhere_sweep(&MassSweepConfig::default(), s)?;
        Ok((
            r.passed(),
            format!(
                "{} instances, {} violations",
                r.instances,
                r.violations.len()
            ),
        ))
    };
    let runs: Vec<(&str, Outcome)> = vec![
        ("testing_bound_equivalence", testing_bound_equivalence(seed, inject_fault)),
        ("chtp_forward", chtp_forward(seed)),
        ("chtp_converse", chtp_converse(seed)),
        ("pinsker", pinsker(seed)),
        ("contraction_sweep", contraction(seed)),
        ("mass_everywhere", mass(seed)),
        ("lemma_suite", lemma(seed)),
        ("closed_form_evaluators", closed_forms()),
    ];
    let checks = runs
        .into_iter()
        .map(|(name, outcome)| {
            let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
            SelftestCheck {
                name: name.to_string(),
                passed,
                detail,
            }
        })
        .collect();
    SelftestReport { seed, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_checks_pass_and_fault_is_caught() {
        assert!(testing_bound_equivalence(5, false).unwrap().0);
        assert!(!testing_bound_equivalence(5, true).unwrap().0);
        assert!(chtp_forward(5).unwrap().0);
        assert!(chtp_converse(5).unwrap().0);
        assert!(pinsker(5).unwrap().0);
        assert!(closed_forms().unwrap().0);
    }
}
