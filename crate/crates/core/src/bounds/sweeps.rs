use rand::Rng;
use serde::{Deserialize, Serialize};

use super::constructions::{
    estimation_testing_chain, two_point_mean_construction, TwoPointConstruction,
};
use super::contraction::{
    random_tv_private_channel, verify_contraction, verify_contraction_non_iid,
};
use super::mass::{random_mass_instance, verify_mass_everywhere};
use super::report::VerificationReport;
use crate::prob::FiniteDistribution;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Tolerance for the exact small-instance verifications.
pub const EXACT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContractionSweepConfig {
    pub instances: usize,
    pub alphabet: usize,
    pub max_n: usize,
    pub outputs: usize,
    /// Also check a non-identically distributed component sequence per instance.
    pub non_iid: bool,
}

impl Default for ContractionSweepConfig {
    fn default() -> Self {
        ContractionSweepConfig {
            instances: 100,
            alphabet: 2,
            max_n: 3,
            outputs: 3,
            non_iid: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MassSweepConfig {
    pub instances: usize,
    pub n: usize,
    pub components: usize,
    pub outputs: usize,
}

impl Default for MassSweepConfig {
    fn default() -> Self {
        MassSweepConfig {
            instances: 50,
            n: 3,
            components: 2,
            outputs: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainSweepConfig {
    pub instances: usize,
    pub max_n: usize,
    #[serde(with = "crate::extended")]
    pub k: f64,
}

impl Default for ChainSweepConfig {
    fn default() -> Self {
        ChainSweepConfig {
            instances: 40,
            max_n: 3,
            k: 2.0,
        }
    }
}

fn labels(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

fn random_distribution<R: Rng + ?Sized>(
    rng: &mut R,
    outcomes: &[String],
) -> Result<FiniteDistribution> {
    let w: Vec<f64> = outcomes
        .iter()
        .map(|_| rng.random::<f64>() + 1e-3)
        .collect();
    FiniteDistribution::from_weights(outcomes.to_vec(), &w)
}

/// Exact contraction checks on random TV-private channels (iid inputs and,
/// optionally, independent non-identical inputs).
pub fn contraction_sweep(
    cfg: &ContractionSweepConfig,
    master_seed: u64,
) -> Result<VerificationReport> {
    if cfg.alphabet < 2 || cfg.max_n == 0 || cfg.outputs < 2 {
        return Err(Error::spec(
            "contraction sweep needs alphabet ≥ 2, max_n ≥ 1, outputs ≥ 2",
        ));
    }
    let mut report = VerificationReport::new("contraction");
    for i in 0..cfg.instances {
        let mut rng = RngStream::new(master_seed, i as u64).rng();
        let n = rng.random_range(1..=cfg.max_n);
        let alphabet = labels("x", cfg.alphabet);
        let lambda = rng.random_range(0.0..1.0);
        let q = random_tv_private_channel(
            &mut rng,
            alphabet.clone(),
            n,
            labels("t", cfg.outputs),
            lambda,
        )?;
        let (p0, p1) = (
            random_distribution(&mut rng, &alphabet)?,
            random_distribution(&mut rng, &alphabet)?,
        );
        let c = verify_contraction(&q, &p0, &p1)?;
        report.record(
            i,
            c.lhs,
            c.bound.value,
            EXACT_TOLERANCE,
            format!("iid, n = {n}, eps_tv = {}", c.eps_tv),
        );
        if cfg.non_iid {
            let p0s = (0..n)
                .map(|_| random_distribution(&mut rng, &alphabet))
                .collect::<Result<Vec<_>>>()?;
            let p1s = (0..n)
                .map(|_| random_distribution(&mut rng, &alphabet))
                .collect::<Result<Vec<_>>>()?;
            let c = verify_contraction_non_iid(&q, &p0s, &p1s)?;
            report.record(
                i,
                c.lhs,
                c.bound.value,
                EXACT_TOLERANCE,
                format!("non-iid, n = {n}, eps_tv = {}", c.eps_tv),
            );
        }
    }
    Ok(report)
}

/// Exhaustive mass-everywhere checks on random ε-DP channels.
pub fn mass_everywhere_sweep(
    cfg: &MassSweepConfig,
    master_seed: u64,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("mass_everywhere");
    for i in 0..cfg.instances {
        let mut rng = RngStream::new(master_seed, i as u64).rng();
        let inst = random_mass_instance(&mut rng, cfg.n, cfg.components, cfg.outputs)?;
        let c = verify_mass_everywhere(&inst)?;
        report.record(
            i,
            -c.min_margin,
            0.0,
            EXACT_TOLERANCE,
            format!(
                "p = {}, eps = {}, delta = {}, subsets = {}",
                inst.p, inst.eps, inst.delta, c.subsets_checked
            ),
        );
    }
    Ok(report)
}

/// Estimation-to-testing chain on random TV-private channels over the
/// two-point support, at `δ* = 1/(4nε)` (clamped to 1).
pub fn chain_sweep(cfg: &ChainSweepConfig, master_seed: u64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("estimation_testing_chain");
    for i in 0..cfg.instances {
        let mut rng = RngStream::new(master_seed, i as u64).rng();
        let n = rng.random_range(1..=cfg.max_n.max(1));
        let lambda = rng.random_range(0.01..1.0);
        let q = random_tv_private_channel(
            &mut rng,
            TwoPointConstruction::labels(),
            n,
            labels("t", 3),
            lambda,
        )?;
        let eps_tv =
            crate::audit::audit_f_privacy(&q, &crate::prob::FDivergenceSpec::TotalVariation, 1.0)?
                .tight_param;
        let delta = (1.0 / (4.0 * n as f64 * eps_tv)).min(1.0);
        let c = two_point_mean_construction(1.0, cfg.k, delta)?;
        let chain = estimation_testing_chain(&q, &c)?;
        report.record(
            i,
            chain.reduction,
            chain.bayes_risk,
            EXACT_TOLERANCE,
            "bayes risk ≥ reduction",
        );
        report.record(
            i,
            chain.closed_form,
            chain.reduction,
            EXACT_TOLERANCE,
            "reduction ≥ closed form",
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_sweeps_pass() {
        let c = contraction_sweep(
            &ContractionSweepConfig {
                instances: 30,
                ..Default::default()
            },
            1,
        )
        .unwrap();
        assert!(c.passed() && c.instances == 60);
        let m = mass_everywhere_sweep(
            &MassSweepConfig {
                instances: 10,
                ..Default::default()
            },
            1,
        )
        .unwrap();
        assert!(m.passed());
        let ch = chain_sweep(&ChainSweepConfig::default(), 1).unwrap();
        assert!(ch.passed());
    }
}
