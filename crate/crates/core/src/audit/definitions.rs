use serde::{Deserialize, Serialize};

use super::verdict::{PrivacyDefinition, PrivacyVerdict, Witness};
use crate::mechanisms::{laplace_max_log_ratio, smooth_metric_distance, MechanismSpec};
use crate::prob::{f_divergence_slices, DiscreteChannel, FDivergenceSpec};
use crate::{Error, Result};

fn check_level(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::spec(format!("{name} must be nonnegative, got {v}")))
    }
}

/// Both orientations of every neighbouring pair.
fn ordered_pairs(q: &DiscreteChannel) -> impl Iterator<Item = (usize, usize)> {
    q.neighbor_pairs()
        .into_iter()
        .flat_map(|p| [(p.a, p.b), (p.b, p.a)])
}

fn log_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        f64::NEG_INFINITY
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        (a / b).ln()
    }
}

/// `e^ε·b`, with `∞·0 = 0`.
fn scaled(eps: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        eps.exp() * b
    }
}

fn witness(
    q: &DiscreteChannel,
    x: usize,
    y: usize,
    outputs: Vec<String>,
    description: String,
) -> Witness {
    Witness {
        datasets: [q.key(x), q.key(y)],
        outputs,
        description,
    }
}

/// Largest `|log q(θ|x) − log q(θ|x′)|` over one orientation of the rows.
fn max_log_ratio(p: &[f64], r: &[f64]) -> (f64, usize) {
    let mut best = (0.0, 0);
    for (j, (&a, &b)) in p.iter().zip(r).enumerate() {
        let l = log_ratio(a, b);
        if l > best.0 {
            best = (l, j);
        }
    }
    best
}

/// Pure DP: the tight ε is the largest single-atom log ratio over neighbouring
/// datasets, which also bounds every set ratio.
pub fn audit_dp(q: &DiscreteChannel, eps: f64) -> Result<PrivacyVerdict> {
    check_level("eps", eps)?;
    let mut best: (f64, Option<(usize, usize, usize)>) = (0.0, None);
    for (x, y) in ordered_pairs(q) {
        let (l, j) = max_log_ratio(q.row(x), q.row(y));
        if l > best.0 {
            best = (l, Some((x, y, j)));
        }
    }
    let w = best.1.map(|(x, y, j)| {
        witness(
            q,
            x,
            y,
            vec![q.output_set()[j].clone()],
            format!("log q(θ|x)/q(θ|x′) = {}", best.0),
        )
    });
    Ok(PrivacyVerdict::new(PrivacyDefinition::Dp, best.0, eps, w))
}

/// `Σ_θ (p(θ) − e^ε r(θ))₊` and the set where the summand is positive.
pub(crate) fn hockey_stick(p: &[f64], r: &[f64], eps: f64) -> (f64, u64) {
    let mut total = 0.0;
    let mut mask = 0u64;
    for (j, (&a, &b)) in p.iter().zip(r).enumerate() {
        let excess = a - scaled(eps, b);
        if excess > 0.0 {
            total += excess;
            if j < 64 {
                mask |= 1 << j;
            }
        }
    }
    (total, mask)
}

/// Approximate DP at `eps`: the tight δ is the largest per-pair hockey-stick
/// divergence `Σ_θ (q(θ|x) − e^ε q(θ|x′))₊`.
pub fn audit_approx_dp(q: &DiscreteChannel, eps: f64, delta: f64) -> Result<PrivacyVerdict> {
    check_level("eps", eps)?;
    check_level("delta", delta)?;
    let mut best: (f64, Option<(usize, usize, u64)>) = (0.0, None);
    for (x, y) in ordered_pairs(q) {
        let (h, mask) = hockey_stick(q.row(x), q.row(y), eps);
        if h > best.0 {
            best = (h, Some((x, y, mask)));
        }
    }
    let w = best.1.map(|(x, y, mask)| {
        witness(
            q,
            x,
            y,
            super::outputs_of_mask(q, mask),
            format!(
                "Q(A|x) − e^ε Q(A|x′) = {} on A = {{θ : q(θ|x) > e^ε q(θ|x′)}}",
                best.0
            ),
        )
    });
    Ok(PrivacyVerdict::new(
        PrivacyDefinition::ApproxDp,
        best.0,
        delta,
        w,
    ))
}

/// Hypothesis-testing form of approximate DP: every test of `x` against `x′`
/// must have `P_x(ψ = 1) + e^ε P_x′(ψ = 0) ≥ 1 − δ`.
///
/// The minimizing test is found atom by atom (`ψ(θ) = 1` iff
/// `q(θ|x) ≤ e^ε q(θ|x′)`). `tight_param` is `1 −` the smallest attainable
/// error sum, i.e. the least δ for which the condition holds.
pub fn audit_testing_bound(q: &DiscreteChannel, eps: f64, delta: f64) -> Result<PrivacyVerdict> {
    check_level("eps", eps)?;
    check_level("delta", delta)?;
    let mut best: (f64, Option<(usize, usize, Vec<String>)>) = (f64::INFINITY, None);
    for (x, y) in ordered_pairs(q) {
        let mut sum = 0.0;
        let mut accept = Vec::new();
        for (j, (&a, &b)) in q.row(x).iter().zip(q.row(y)).enumerate() {
            let weighted = scaled(eps, b);
            if a <= weighted {
                sum += a;
                accept.push(q.output_set()[j].clone());
            } else {
                sum += weighted;
            }
        }
        if sum < best.0 {
            best = (sum, Some((x, y, accept)));
        }
    }
    if best.1.is_none() {
        return Ok(PrivacyVerdict::new(
            PrivacyDefinition::TestingBound,
            0.0,
            delta,
            None,
        ));
    }
    let min_sum = best.0;
    let w = best.1.map(|(x, y, accept)| {
        witness(
            q,
            x,
            y,
            accept,
            format!("ψ = 1 on the listed outputs; P_x(ψ=1) + e^ε P_x′(ψ=0) = {min_sum}"),
        )
    });
    Ok(PrivacyVerdict::new(
        PrivacyDefinition::TestingBound,
        (1.0 - min_sum).max(0.0),
        delta,
        w,
    ))
}

/// Smallest sum of false-positive and false-negative rates an (ε, δ)-DP
/// release permits: `(2 − δ)/(1 + e^ε)`.
pub fn disclosure_risk_floor(eps: f64, delta: f64) -> f64 {
    (2.0 - delta) / (1.0 + eps.exp())
}

/// A bounded semimetric on the input alphabet, `rho[u][v] ≤ r_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSpec {
    pub rho: Vec<Vec<f64>>,
    pub r_bound: f64,
}

impl MetricSpec {
    /// `ρ(u, v) = 1{u ≠ v}` with `r = 1`; smooth DP then coincides with DP.
    pub fn discrete(k: usize) -> Self {
        let rho = (0..k)
            .map(|u| (0..k).map(|v| if u == v { 0.0 } else { 1.0 }).collect())
            .collect();
        MetricSpec { rho, r_bound: 1.0 }
    }

    pub fn validate(&self, alphabet_size: usize) -> Result<()> {
        if self.rho.len() != alphabet_size || self.rho.iter().any(|r| r.len() != alphabet_size) {
            return Err(Error::domain(format!(
                "metric table must be {alphabet_size}×{alphabet_size}"
            )));
        }
        if !(self.r_bound > 0.0 && self.r_bound.is_finite()) {
            return Err(Error::spec("r_bound must be positive and finite"));
        }
        for u in 0..alphabet_size {
            if self.rho[u][u] != 0.0 {
                return Err(Error::spec("metric must vanish on the diagonal"));
            }
            for v in 0..alphabet_size {
                let d = self.rho[u][v];
                if !(d >= 0.0) || d > self.r_bound || d != self.rho[v][u] {
                    return Err(Error::spec(format!(
                        "rho[{u}][{v}] = {d} breaks symmetry, nonnegativity or the bound {}",
                        self.r_bound
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Smooth DP: `|log q(θ|x) − log q(θ|x′)| ≤ ε d_ρ(x, x′)` with
/// `d_ρ = (1/r) Σ ρ(x_i, x′_i)`.
///
/// Only single-coordinate pairs are examined; since `d_ρ` adds over
/// coordinates, chaining them certifies the condition for all pairs.
pub fn audit_smooth_dp(
    q: &DiscreteChannel,
    metric: &MetricSpec,
    eps: f64,
) -> Result<PrivacyVerdict> {
    check_level("eps", eps)?;
    metric.validate(q.input_alphabet().len())?;
    let mut best: (f64, Option<(usize, usize, usize)>) = (0.0, None);
    let mut degenerate = false;
    for pair in q.neighbor_pairs() {
        let (u, v) = (
            q.dataset(pair.a)[pair.coordinate],
            q.dataset(pair.b)[pair.coordinate],
        );
        let dist = metric.rho[u][v] / metric.r_bound;
        for (x, y) in [(pair.a, pair.b), (pair.b, pair.a)] {
            let (l, j) = max_log_ratio(q.row(x), q.row(y));
            if l == 0.0 {
                continue;
            }
            let ratio = if dist == 0.0 {
                degenerate = true;
                f64::INFINITY
            } else {
                l / dist
            };
            if ratio > best.0 {
                best = (ratio, Some((x, y, j)));
            }
        }
    }
    let w = best.1.map(|(x, y, j)| {
        witness(
            q,
            x,
            y,
            vec![q.output_set()[j].clone()],
            format!("log-ratio / d_ρ = {}", best.0),
        )
    });
    let verdict = PrivacyVerdict::new(PrivacyDefinition::SmoothDp, best.0, eps, w);
    Ok(if degenerate {
        verdict.with_note("rows differ on a pair at metric distance zero")
    } else {
        verdict
    })
}

/// Two samples of points in `R^d`, compared as neighbours.
pub type SamplePair = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Analytic smooth-DP audit of the Laplace truncated-mean mechanism on the
/// supplied sample pairs, using the closed form
/// `sup_z log p(z|x)/p(z|x′) = κ‖v − v′‖₁` and `ρ(x, x′) = ‖x − x′‖₂ ∧ 2T`
/// with `r = 2T`.
pub fn audit_smooth_dp_laplace(
    spec: &MechanismSpec,
    pairs: &[SamplePair],
) -> Result<PrivacyVerdict> {
    let t = spec.truncation_radius();
    let mut best: (f64, Option<usize>) = (0.0, None);
    for (i, (a, b)) in pairs.iter().enumerate() {
        let l = laplace_max_log_ratio(spec, a, b)?;
        if l == 0.0 {
            continue;
        }
        let dist = smooth_metric_distance(a, b, t)?;
        let ratio = if dist == 0.0 { f64::INFINITY } else { l / dist };
        if ratio > best.0 {
            best = (ratio, Some(i));
        }
    }
    let w = best.1.map(|i| Witness {
        datasets: [format!("pair {i}: x"), format!("pair {i}: x′")],
        outputs: Vec::new(),
        description: format!("κ‖v − v′‖₁ / d_ρ = {}", best.0),
    });
    Ok(
        PrivacyVerdict::new(PrivacyDefinition::SmoothDp, best.0, spec.eps, w)
            .with_note(format!("checked {} sample pairs analytically", pairs.len())),
    )
}

/// f-divergence privacy: the tight level is the largest `D_f(q(·|x) ‖ q(·|x′))`
/// over ordered neighbouring pairs. The TV tag reproduces the sup over sets.
pub fn audit_f_privacy(
    q: &DiscreteChannel,
    spec: &FDivergenceSpec,
    level: f64,
) -> Result<PrivacyVerdict> {
    check_level("level", level)?;
    let definition = match spec {
        FDivergenceSpec::TotalVariation => PrivacyDefinition::Tv,
        FDivergenceSpec::KullbackLeibler => PrivacyDefinition::Kl,
        FDivergenceSpec::Custom { .. } => PrivacyDefinition::FDiv,
    };
    let mut best: (f64, Option<(usize, usize)>) = (0.0, None);
    for (x, y) in ordered_pairs(q) {
        let v = f_divergence_slices(spec, q.row(x), q.row(y));
        if v > best.0 {
            best = (v, Some((x, y)));
        }
    }
    let w = best.1.map(|(x, y)| {
        let outputs = match spec {
            FDivergenceSpec::TotalVariation => {
                super::outputs_of_mask(q, hockey_stick(q.row(x), q.row(y), 0.0).1)
            }
            _ => Vec::new(),
        };
        witness(q, x, y, outputs, format!("{} = {}", spec.name(), best.0))
    });
    Ok(PrivacyVerdict::new(definition, best.0, level, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{randomized_response, release_one_at_random};
    use crate::rng::RngStream;
    use rand::Rng;

    fn labels(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("v{i}")).collect()
    }

    fn random_channel(rng: &mut impl Rng, k: usize, n: usize, outputs: usize) -> DiscreteChannel {
        DiscreteChannel::from_fn(labels(k), n, labels(outputs), |_| {
            let w: Vec<f64> = (0..outputs).map(|_| rng.random::<f64>() + 0.01).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        })
        .unwrap()
    }

    #[test]
    fn constant_channel_is_perfectly_private() {
        let q = DiscreteChannel::constant(labels(3), 2, labels(2), vec![0.3, 0.7]).unwrap();
        assert_eq!(audit_dp(&q, 0.0).unwrap().tight_param, 0.0);
        assert_eq!(audit_approx_dp(&q, 0.0, 0.0).unwrap().tight_param, 0.0);
        assert_eq!(
            audit_smooth_dp(&q, &MetricSpec::discrete(3), 0.0)
                .unwrap()
                .tight_param,
            0.0
        );
        assert_eq!(
            audit_f_privacy(&q, &FDivergenceSpec::KullbackLeibler, 0.0)
                .unwrap()
                .tight_param,
            0.0
        );
    }

    #[test]
    fn randomized_response_epsilon() {
        for c in [0.1, 0.5, 1.0, 3.0] {
            let q = randomized_response(c).unwrap();
            let flip = 1.0 / (1.0 + f64::exp(c));
            let oracle = ((1.0 - flip) / flip).ln();
            assert!((audit_dp(&q, c).unwrap().tight_param - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn release_one_is_not_dp() {
        let q = release_one_at_random(labels(3), 2).unwrap();
        let v = audit_dp(&q, 100.0).unwrap();
        assert!(!v.holds);
        assert_eq!(v.tight_param, f64::INFINITY);
        let tv = audit_f_privacy(
            &release_one_at_random(labels(2), 5).unwrap(),
            &FDivergenceSpec::TotalVariation,
            0.2,
        )
        .unwrap();
        assert!((tv.tight_param - 0.2).abs() < 1e-12 && tv.holds);
    }

    #[test]
    fn approx_dp_matches_subset_enumeration() {
        let mut rng = RngStream::new(11, 0).rng();
        for _ in 0..50 {
            let outputs = rng.random_range(2..=12);
            let q = random_channel(&mut rng, 2, 1, outputs);
            let eps = rng.random_range(0.0..2.0);
            let tight = audit_approx_dp(&q, eps, 0.0).unwrap().tight_param;
            let mut oracle = 0.0f64;
            for (x, y) in [(0, 1), (1, 0)] {
                for mask in 0u64..1 << outputs {
                    let pa: f64 = (0..outputs)
                        .filter(|j| mask >> j & 1 == 1)
                        .map(|j| q.row(x)[j])
                        .sum();
                    let pb: f64 = (0..outputs)
                        .filter(|j| mask >> j & 1 == 1)
                        .map(|j| q.row(y)[j])
                        .sum();
                    oracle = oracle.max(pa - eps.exp() * pb);
                }
            }
            assert!((tight - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_is_nonincreasing_in_eps() {
        let mut rng = RngStream::new(12, 0).rng();
        for _ in 0..20 {
            let q = random_channel(&mut rng, 2, 2, 5);
            let mut last = f64::INFINITY;
            for i in 0..30 {
                let d = audit_approx_dp(&q, i as f64 * 0.1, 0.0)
                    .unwrap()
                    .tight_param;
                assert!(d <= last + 1e-15);
                last = d;
            }
        }
    }

    #[test]
    fn testing_bound_agrees_with_approx_dp() {
        let mut rng = RngStream::new(13, 0).rng();
        for _ in 0..200 {
            let q = random_channel(&mut rng, 2, 2, 4);
            let eps = rng.random_range(0.0..1.5);
            let delta = rng.random_range(0.0..0.5);
            let a = audit_approx_dp(&q, eps, delta).unwrap();
            let t = audit_testing_bound(&q, eps, delta).unwrap();
            assert_eq!(a.holds, t.holds);
            assert!((a.tight_param - t.tight_param).abs() < 1e-9);
            assert!(audit_testing_bound(&q, eps, 1.0).unwrap().holds);
        }
    }

    #[test]
    fn per_atom_ratio_equals_set_ratio() {
        let mut rng = RngStream::new(14, 0).rng();
        for _ in 0..30 {
            let outputs = rng.random_range(2..=10);
            let q = random_channel(&mut rng, 2, 1, outputs);
            let atom = audit_dp(&q, 0.0).unwrap().tight_param;
            let mut oracle = 0.0f64;
            for (x, y) in [(0, 1), (1, 0)] {
                for mask in 1u64..1 << outputs {
                    let pa: f64 = (0..outputs)
                        .filter(|j| mask >> j & 1 == 1)
                        .map(|j| q.row(x)[j])
                        .sum();
                    let pb: f64 = (0..outputs)
                        .filter(|j| mask >> j & 1 == 1)
                        .map(|j| q.row(y)[j])
                        .sum();
                    oracle = oracle.max((pa / pb).ln());
                }
            }
            assert!((atom - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn smooth_dp_dominates_scaled_dp() {
        let mut rng = RngStream::new(15, 0).rng();
        for _ in 0..30 {
            let q = random_channel(&mut rng, 3, 2, 3);
            let mut rho = vec![vec![0.0; 3]; 3];
            for u in 0..3 {
                for v in u + 1..3 {
                    let d = rng.random_range(0.1..2.0);
                    rho[u][v] = d;
                    rho[v][u] = d;
                }
            }
            let metric = MetricSpec { rho, r_bound: 2.0 };
            let smooth = audit_smooth_dp(&q, &metric, 0.0).unwrap().tight_param;
            let dp = audit_dp(&q, 0.0).unwrap().tight_param;
            // ρ/r ≤ 1 on every pair, so the smooth ratio is at least the DP ratio.
            assert!(smooth >= dp - 1e-12);
        }
        let q = randomized_response(0.7).unwrap();
        let smooth = audit_smooth_dp(&q, &MetricSpec::discrete(2), 0.7).unwrap();
        assert!((smooth.tight_param - 0.7).abs() < 1e-12);
    }

    #[test]
    fn metric_validation() {
        let bad = MetricSpec {
            rho: vec![vec![0.0, 1.0], vec![0.5, 0.0]],
            r_bound: 1.0,
        };
        assert!(bad.validate(2).is_err());
        let bad = MetricSpec {
            rho: vec![vec![0.0, 3.0], vec![3.0, 0.0]],
            r_bound: 1.0,
        };
        assert!(bad.validate(2).is_err());
        assert!(MetricSpec::discrete(2).validate(3).is_err());
    }

    #[test]
    fn pinsker_between_kl_and_tv() {
        let mut rng = RngStream::new(16, 0).rng();
        for _ in 0..50 {
            let q = random_channel(&mut rng, 2, 2, 4);
            let kl = audit_f_privacy(&q, &FDivergenceSpec::KullbackLeibler, 0.0)
                .unwrap()
                .tight_param;
            let tv = audit_f_privacy(&q, &FDivergenceSpec::TotalVariation, 0.0)
                .unwrap()
                .tight_param;
            assert!(kl >= 2.0 * tv * tv - 1e-12);
        }
    }

    #[test]
    fn dp_channels_respect_disclosure_floor() {
        let mut rng = RngStream::new(17, 0).rng();
        for _ in 0..50 {
            let q = random_channel(&mut rng, 2, 2, 3);
            let eps = audit_dp(&q, 0.0).unwrap().tight_param;
            let tv = audit_f_privacy(&q, &FDivergenceSpec::TotalVariation, 0.0)
                .unwrap()
                .tight_param;
            assert!(1.0 - tv >= disclosure_risk_floor(eps, 0.0) - 1e-12);
        }
    }

    #[test]
    fn laplace_mechanism_certified() {
        let spec = MechanismSpec::smooth_dp_laplace(1.0, 3, 4, 0.8);
        let mut rng = RngStream::new(18, 0).rng();
        let mut pairs = Vec::new();
        for _ in 0..200 {
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Vec<f64>> {
                (0..4)
                    .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
                    .collect()
            };
            let a = draw(&mut rng);
            let mut b = draw(&mut rng);
            if rng.random_bool(0.5) {
                b = a.clone();
                b[1] = vec![0.3, -0.1, 0.0];
            }
            pairs.push((a, b));
        }
        let v = audit_smooth_dp_laplace(&spec, &pairs).unwrap();
        assert!(v.holds, "{v:?}");
        assert!(v.tight_param > 0.0);
    }
}
