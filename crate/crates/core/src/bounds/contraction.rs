use rand::Rng;

use crate::audit::audit_f_privacy;
use crate::prob::{
    channel_marginal, dataset_distribution, product_distribution, tv_distance, DiscreteChannel,
    FDivergenceSpec, FiniteDistribution,
};
use crate::{Error, Result};

/// `min(2ε Σ TV(P₀ᵢ, P₁ᵢ), TV(⊗P₀ᵢ, ⊗P₁ᵢ))`. When the product space exceeds
/// the enumeration cap only the first term is available and
/// `exact_product_tv` is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionBound {
    pub value: f64,
    pub first_term: f64,
    pub exact_product_tv: Option<f64>,
}

impl ContractionBound {
    pub fn flagged(&self) -> bool {
        self.exact_product_tv.is_none()
    }
}

/// Bound on `TV(M₀, M₁)` for an ε-TV private channel fed `n` iid draws.
pub fn contraction_bound(
    p0: &FiniteDistribution,
    p1: &FiniteDistribution,
    n: usize,
    eps: f64,
) -> Result<ContractionBound> {
    contraction_bound_non_iid(&vec![p0.clone(); n], &vec![p1.clone(); n], eps)
}

/// Bound for independent but not identically distributed coordinates.
pub fn contraction_bound_non_iid(
    p0: &[FiniteDistribution],
    p1: &[FiniteDistribution],
    eps: f64,
) -> Result<ContractionBound> {
    if p0.len() != p1.len() || p0.is_empty() {
        return Err(Error::domain(
            "component sequences must be nonempty and of equal length",
        ));
    }
    if !(eps >= 0.0) {
        return Err(Error::spec(format!("eps must be nonnegative, got {eps}")));
    }
    let mut sum = 0.0;
    for (a, b) in p0.iter().zip(p1) {
        sum += tv_distance(a, b)?;
    }
    let first_term = if sum == 0.0 { 0.0 } else { 2.0 * eps * sum };
    let exact_product_tv = match (product_distribution(p0), product_distribution(p1)) {
        (Ok(a), Ok(b)) => Some(tv_distance(&a, &b)?),
        (Err(Error::Resource(_)), _) | (_, Err(Error::Resource(_))) => None,
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let value = exact_product_tv.map_or(first_term, |t| t.min(first_term));
    Ok(ContractionBound {
        value,
        first_term,
        exact_product_tv,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionCheck {
    /// Tight TV-privacy level of the channel, from the audit.
    pub eps_tv: f64,
    /// Exact `TV(M₀, M₁)`.
    pub lhs: f64,
    pub bound: ContractionBound,
}

impl ContractionCheck {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.lhs <= self.bound.value + tolerance
    }
}

/// Exact check of the contraction inequality for `q` with iid inputs from
/// `p0` versus `p1`, at the channel's audited TV level.
pub fn verify_contraction(
    q: &DiscreteChannel,
    p0: &FiniteDistribution,
    p1: &FiniteDistribution,
) -> Result<ContractionCheck> {
    verify_contraction_non_iid(q, &vec![p0.clone(); q.n()], &vec![p1.clone(); q.n()])
}

/// As [`verify_contraction`], with coordinate `i` drawn from `p0[i]` or `p1[i]`.
pub fn verify_contraction_non_iid(
    q: &DiscreteChannel,
    p0: &[FiniteDistribution],
    p1: &[FiniteDistribution],
) -> Result<ContractionCheck> {
    let eps_tv = audit_f_privacy(q, &FDivergenceSpec::TotalVariation, 1.0)?.tight_param;
    let m0 = channel_marginal(q, &dataset_distribution(q, p0)?)?;
    let m1 = channel_marginal(q, &dataset_distribution(q, p1)?)?;
    Ok(ContractionCheck {
        eps_tv,
        lhs: tv_distance(&m0, &m1)?,
        bound: contraction_bound_non_iid(p0, p1, eps_tv)?,
    })
}

/// A random channel mixed toward a random constant channel with weight
/// `1 − λ`, so its TV level is `λ` times that of the unmixed channel.
pub fn random_tv_private_channel<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: Vec<String>,
    n: usize,
    outputs: Vec<String>,
    lambda: f64,
) -> Result<DiscreteChannel> {
    let m = outputs.len();
    let row = |rng: &mut R| -> Vec<f64> {
        let w: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 1e-3).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    };
    let base = DiscreteChannel::from_fn(alphabet.clone(), n, outputs.clone(), |_| row(rng))?;
    let constant = DiscreteChannel::constant(alphabet, n, outputs, row(rng))?;
    base.mix(&constant, lambda)
}
