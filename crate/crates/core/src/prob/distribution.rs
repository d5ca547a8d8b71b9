use serde::{Deserialize, Serialize};

use super::{DEFAULT_ENUMERATION_CAP, NORMALIZATION_TOL};
use crate::{Error, Result};

/// A probability vector over an ordered, finite set of labelled outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDistribution")]
pub struct FiniteDistribution {
    outcomes: Vec<String>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistribution {
    outcomes: Vec<String>,
    probs: Vec<f64>,
}

impl TryFrom<RawDistribution> for FiniteDistribution {
    type Error = Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        FiniteDistribution::new(raw.outcomes, raw.probs)
    }
}

impl FiniteDistribution {
    pub fn new(outcomes: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::spec("distribution needs at least one outcome"));
        }
        if outcomes.len() != probs.len() {
            return Err(Error::spec(format!(
                "{} outcomes but {} probabilities",
                outcomes.len(),
                probs.len()
            )));
        }
        validate_probs(&probs)?;
        Ok(FiniteDistribution { outcomes, probs })
    }

    /// Outcomes labelled `"0"`, `"1"`, ...
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let outcomes = (0..probs.len()).map(|i| i.to_string()).collect();
        FiniteDistribution::new(outcomes, probs)
    }

    /// Rescales a nonnegative weight vector to sum to one.
    pub fn from_weights(outcomes: Vec<String>, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::spec("weights must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::spec("weights sum to zero"));
        }
        FiniteDistribution::new(outcomes, weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(outcomes: Vec<String>) -> Result<Self> {
        let k = outcomes.len();
        FiniteDistribution::new(outcomes, vec![1.0 / k as f64; k])
    }

    pub fn point_mass(outcomes: Vec<String>, index: usize) -> Result<Self> {
        if index >= outcomes.len() {
            return Err(Error::domain(format!(
                "point mass index {index} out of range"
            )));
        }
        let mut probs = vec![0.0; outcomes.len()];
        probs[index] = 1.0;
        FiniteDistribution::new(outcomes, probs)
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Mass of the subset encoded by `mask` (bit `i` selects outcome `i`).
    pub fn mass_of_mask(&self, mask: u64) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p)
            .sum()
    }

    pub(crate) fn ensure_same_space(&self, other: &FiniteDistribution) -> Result<()> {
        if self.outcomes != other.outcomes {
            return Err(Error::domain(
                "distributions live on different outcome sets",
            ));
        }
        Ok(())
    }
}

pub(crate) fn validate_probs(probs: &[f64]) -> Result<()> {
    if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::spec(format!("invalid probability {bad}")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::spec(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Product measure of independent components.
///
/// Atoms are ordered lexicographically with the first component most
/// significant, and labelled by comma-joining the component labels, which is
/// the same canonical order [`DiscreteChannel`](super::DiscreteChannel) uses
/// for datasets.
pub fn product_distribution(components: &[FiniteDistribution]) -> Result<FiniteDistribution> {
    product_distribution_with_cap(components, DEFAULT_ENUMERATION_CAP)
}

pub fn product_distribution_with_cap(
    components: &[FiniteDistribution],
    cap: usize,
) -> Result<FiniteDistribution> {
    if components.is_empty() {
        return Err(Error::spec("product of zero components"));
    }
    let size = components
        .iter()
        .try_fold(1usize, |acc, c| acc.checked_mul(c.len()))
        .filter(|s| *s <= cap)
        .ok_or_else(|| Error::resource(format!("product space exceeds cap {cap}")))?;

    let mut outcomes = Vec::with_capacity(size);
    let mut probs = Vec::with_capacity(size);
    outcomes.push(String::new());
    probs.push(1.0);
    for (depth, comp) in components.iter().enumerate() {
        let mut next_outcomes = Vec::with_capacity(outcomes.len() * comp.len());
        let mut next_probs = Vec::with_capacity(outcomes.len() * comp.len());
        for (label, p) in outcomes.iter().zip(&probs) {
            for (l, q) in comp.outcomes.iter().zip(&comp.probs) {
                next_outcomes.push(if depth == 0 {
                    l.clone()
                } else {
                    format!("{label},{l}")
                });
                next_probs.push(p * q);
            }
        }
        outcomes = next_outcomes;
        probs = next_probs;
    }
    // Products of normalised vectors drift by a few ulps; renormalise.
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    FiniteDistribution::new(outcomes, probs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(k: usize) -> Vec<String> {
        (0..k).map(|i| i.to_string()).collect()
    }

    #[test]
    fn rejects_bad_vectors() {
        assert!(FiniteDistribution::from_probs(vec![0.5, 0.6]).is_err());
        assert!(FiniteDistribution::from_probs(vec![1.5, -0.5]).is_err());
        assert!(FiniteDistribution::new(labels(3), vec![1.0]).is_err());
        assert!(FiniteDistribution::from_probs(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn single_component_product_is_identity() {
        let p = FiniteDistribution::from_probs(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(product_distribution(std::slice::from_ref(&p)).unwrap(), p);
    }

    #[test]
    fn two_fair_coins_give_uniform_four() {
        let coin = FiniteDistribution::uniform(labels(2)).unwrap();
        let prod = product_distribution(&[coin.clone(), coin]).unwrap();
        assert_eq!(prod.outcomes(), ["0,0", "0,1", "1,0", "1,1"]);
        for p in prod.probs() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn product_cap_is_enforced() {
        let p = FiniteDistribution::uniform(labels(10)).unwrap();
        let comps = vec![p; 5];
        assert!(matches!(
            product_distribution(&comps),
            Err(Error::Resource(_))
        ));
        assert!(product_distribution_with_cap(&comps[..4], 10_000).is_ok());
    }

    #[test]
    fn mask_mass() {
        let p = FiniteDistribution::from_probs(vec![0.1, 0.2, 0.7]).unwrap();
        assert!((p.mass_of_mask(0b101) - 0.8).abs() < 1e-15);
        assert_eq!(p.mass_of_mask(0), 0.0);
    }

    #[test]
    fn json_round_trip_validates() {
        let p = FiniteDistribution::from_probs(vec![0.25, 0.75]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<FiniteDistribution>(&s).unwrap(), p);
        let bad = r#"{"outcomes":["a","b"],"probs":[0.5,0.4]}"#;
        assert!(serde_json::from_str::<FiniteDistribution>(bad).is_err());
    }
}
