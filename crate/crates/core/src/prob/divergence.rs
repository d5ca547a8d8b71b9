use std::fmt;
use std::sync::Arc;

use super::FiniteDistribution;
use crate::{Error, Result};

/// Generator of an f-divergence `D_f(P‖Q) = Σ f(p/q) q`.
///
/// The two built-in tags use `f(t) = ½|t − 1|` (so the divergence *is* the
/// total variation distance) and `f(t) = t log t`. A custom generator must
/// also supply its recession slope `lim_{t→∞} f(t)/t`, which prices mass that
/// `P` puts where `Q` has none.
#[derive(Clone)]
pub enum FDivergenceSpec {
    TotalVariation,
    KullbackLeibler,
    Custom {
        name: String,
        generator: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        recession_slope: f64,
    },
}

impl fmt::Debug for FDivergenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FDivergenceSpec {
    /// Validates `f(1) = 0` and midpoint convexity on a sampling grid.
    pub fn custom<F>(name: impl Into<String>, generator: F, recession_slope: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let at_one = generator(1.0);
        if !(at_one.abs() <= 1e-12) {
            return Err(Error::spec(format!("f(1) = {at_one}, expected 0")));
        }
        let grid: Vec<f64> = (0..=60)
            .map(|i| 10f64.powf(-3.0 + i as f64 * 0.1))
            .collect();
        for (i, &a) in grid.iter().enumerate() {
            for &b in &grid[i + 1..] {
                let mid = generator(0.5 * (a + b));
                let chord = 0.5 * (generator(a) + generator(b));
                if mid > chord + 1e-9 * (1.0 + chord.abs()) {
                    return Err(Error::spec(format!(
                        "generator is not convex between {a} and {b}"
                    )));
                }
            }
        }
        Ok(FDivergenceSpec::Custom {
            name: name.into(),
            generator: Arc::new(generator),
            recession_slope,
        })
    }

    /// Pearson chi-square, `f(t) = (t − 1)²`.
    pub fn chi_square() -> Self {
        Self::custom("chi-square", |t| (t - 1.0) * (t - 1.0), f64::INFINITY)
            .expect("chi-square generator is valid")
    }

    /// Squared Hellinger distance, `f(t) = (√t − 1)²`.
    pub fn hellinger() -> Self {
        Self::custom("hellinger", |t: f64| (t.sqrt() - 1.0).powi(2), 1.0)
            .expect("hellinger generator is valid")
    }

    pub fn name(&self) -> &str {
        match self {
            FDivergenceSpec::TotalVariation => "total-variation",
            FDivergenceSpec::KullbackLeibler => "kullback-leibler",
            FDivergenceSpec::Custom { name, .. } => name,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        match self {
            FDivergenceSpec::TotalVariation => 0.5 * (t - 1.0).abs(),
            FDivergenceSpec::KullbackLeibler => {
                if t == 0.0 {
                    0.0
                } else {
                    t * t.ln()
                }
            }
            FDivergenceSpec::Custom { generator, .. } => generator(t),
        }
    }

    fn recession(&self) -> f64 {
        match self {
            FDivergenceSpec::TotalVariation => 0.5,
            FDivergenceSpec::KullbackLeibler => f64::INFINITY,
            FDivergenceSpec::Custom {
                recession_slope, ..
            } => *recession_slope,
        }
    }
}

/// `sup_A |P(A) − Q(A)|`, computed as half the L1 distance.
pub fn tv_distance(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    p.ensure_same_space(q)?;
    Ok(tv_slices(p.probs(), q.probs()))
}

pub(crate) fn tv_slices(p: &[f64], q: &[f64]) -> f64 {
    let l1: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    (0.5 * l1).min(1.0)
}

/// `Σ p log(p/q)` with `0 log(0/q) = 0`; `+∞` when `p` charges a `q`-null atom.
pub fn kl_divergence(p: &FiniteDistribution, q: &FiniteDistribution) -> Result<f64> {
    p.ensure_same_space(q)?;
    Ok(kl_slices(p.probs(), q.probs()))
}

pub(crate) fn kl_slices(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return f64::INFINITY;
        }
        total += a * (a / b).ln();
    }
    total.max(0.0)
}

pub fn f_divergence(
    spec: &FDivergenceSpec,
    p: &FiniteDistribution,
    q: &FiniteDistribution,
) -> Result<f64> {
    p.ensure_same_space(q)?;
    Ok(f_divergence_slices(spec, p.probs(), q.probs()))
}

pub(crate) fn f_divergence_slices(spec: &FDivergenceSpec, p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let term = if b > 0.0 {
            spec.eval(a / b) * b
        } else if a > 0.0 {
            // lim_{t↓0} t f(a/t) = a · f'(∞)
            a * spec.recession()
        } else {
            0.0
        };
        if term == f64::INFINITY {
            return f64::INFINITY;
        }
        total += term;
    }
    total
}

/// Minimum total error `inf_ψ {P₀(ψ ≠ 0) + P₁(ψ ≠ 1)} = 1 − TV(P₀, P₁)`.
pub fn le_cam_error(m0: &FiniteDistribution, m1: &FiniteDistribution) -> Result<f64> {
    Ok(1.0 - tv_distance(m0, m1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(p: &[f64]) -> FiniteDistribution {
        FiniteDistribution::from_probs(p.to_vec()).unwrap()
    }

    #[test]
    fn tv_examples() {
        assert_eq!(
            tv_distance(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(),
            1.0
        );
        let p = dist(&[0.3, 0.7]);
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert!(
            (tv_distance(&dist(&[0.5, 0.5]), &dist(&[0.75, 0.25])).unwrap() - 0.25).abs() < 1e-15
        );
    }

    #[test]
    fn kl_examples() {
        let p = dist(&[0.3, 0.7]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        let v = kl_divergence(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-15);
        assert_eq!(
            kl_divergence(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0])).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn mismatched_outcomes_are_domain_errors() {
        let p = dist(&[0.5, 0.5]);
        let q = dist(&[0.2, 0.3, 0.5]);
        assert!(matches!(tv_distance(&p, &q), Err(Error::Domain(_))));
        assert!(matches!(kl_divergence(&p, &q), Err(Error::Domain(_))));
        assert!(matches!(le_cam_error(&p, &q), Err(Error::Domain(_))));
    }

    #[test]
    fn abs_generator_gives_twice_tv() {
        let full = FDivergenceSpec::custom("abs", |t: f64| (t - 1.0).abs(), 1.0).unwrap();
        let p = dist(&[0.1, 0.6, 0.3]);
        let q = dist(&[0.4, 0.0, 0.6]);
        let tv = tv_distance(&p, &q).unwrap();
        assert!((f_divergence(&full, &p, &q).unwrap() - 2.0 * tv).abs() < 1e-15);
        assert!(
            (f_divergence(&FDivergenceSpec::TotalVariation, &p, &q).unwrap() - tv).abs() < 1e-15
        );
    }

    #[test]
    fn chi_square_matches_direct_sum() {
        // Brute-force oracle: Σ (p − q)² / q.
        let p = [0.2, 0.5, 0.3];
        let q = [0.45, 0.15, 0.4];
        let oracle: f64 = p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b) / b).sum();
        let got = f_divergence(&FDivergenceSpec::chi_square(), &dist(&p), &dist(&q)).unwrap();
        assert!((got - oracle).abs() < 1e-14);
    }

    #[test]
    fn kl_tag_at_equal_inputs_is_zero() {
        let p = dist(&[0.25, 0.25, 0.5]);
        assert_eq!(
            f_divergence(&FDivergenceSpec::KullbackLeibler, &p, &p).unwrap(),
            0.0
        );
    }

    #[test]
    fn custom_generator_contract() {
        assert!(FDivergenceSpec::custom("shifted", |t: f64| (t - 1.0).abs() + 0.1, 1.0).is_err());
        assert!(FDivergenceSpec::custom("concave", |t: f64| -(t - 1.0).powi(2), 0.0).is_err());
        assert!(FDivergenceSpec::custom("tv", |t: f64| 0.5 * (t - 1.0).abs(), 0.5).is_ok());
    }

    #[test]
    fn le_cam_examples() {
        let p = dist(&[0.3, 0.7]);
        assert_eq!(le_cam_error(&p, &p).unwrap(), 1.0);
        assert_eq!(
            le_cam_error(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(),
            0.0
        );
        assert!(
            (le_cam_error(&dist(&[0.5, 0.5]), &dist(&[0.75, 0.25])).unwrap() - 0.75).abs() < 1e-15
        );
    }
}
