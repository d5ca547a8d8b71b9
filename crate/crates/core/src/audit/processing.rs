use serde::Serialize;

use super::definitions::{audit_approx_dp, audit_dp, audit_f_privacy};
use crate::prob::{compose_channels, DiscreteChannel, FDivergenceSpec};
use crate::{Result, VERDICT_SLACK};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterComparison {
    pub parameter: String,
    #[serde(with = "crate::extended")]
    pub original: f64,
    #[serde(with = "crate::extended")]
    pub processed: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessingReport {
    pub holds: bool,
    pub comparisons: Vec<ParameterComparison>,
}

/// Checks that post-processing `q` by the kernel `post` does not increase
/// the tight DP ε, the tight δ(ε) at ε ∈ {0, ½, 1}, or the tight TV and KL
/// levels.
pub fn check_information_processing(
    q: &DiscreteChannel,
    post: &DiscreteChannel,
) -> Result<ProcessingReport> {
    let composed = compose_channels(post, q)?;
    let mut comparisons = Vec::new();
    let mut push = |parameter: String, original: f64, processed: f64| {
        comparisons.push(ParameterComparison {
            parameter,
            original,
            processed,
            holds: processed <= original + VERDICT_SLACK,
        });
    };
    push(
        "dp_eps".into(),
        audit_dp(q, 0.0)?.tight_param,
        audit_dp(&composed, 0.0)?.tight_param,
    );
    for eps in [0.0, 0.5, 1.0] {
        push(
            format!("delta_at_eps_{eps}"),
            audit_approx_dp(q, eps, 0.0)?.tight_param,
            audit_approx_dp(&composed, eps, 0.0)?.tight_param,
        );
    }
    for spec in [
        FDivergenceSpec::TotalVariation,
        FDivergenceSpec::KullbackLeibler,
    ] {
        push(
            spec.name().to_string(),
            audit_f_privacy(q, &spec, 0.0)?.tight_param,
            audit_f_privacy(&composed, &spec, 0.0)?.tight_param,
        );
    }
    Ok(ProcessingReport {
        holds: comparisons.iter().all(|c| c.holds),
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use rand::Rng;

    fn labels(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("v{i}")).collect()
    }

    fn stochastic_row(rng: &mut impl Rng, k: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    }

    #[test]
    fn identity_and_constant_post() {
        let mut rng = RngStream::new(41, 0).rng();
        let q = DiscreteChannel::from_fn(labels(2), 2, labels(3), |_| stochastic_row(&mut rng, 3))
            .unwrap();
        let report =
            check_information_processing(&q, &DiscreteChannel::identity(labels(3)).unwrap())
                .unwrap();
        assert!(report.holds);
        for c in &report.comparisons {
            assert!((c.original - c.processed).abs() < 1e-12, "{c:?}");
        }
        let constant = DiscreteChannel::constant(labels(3), 1, labels(2), vec![0.4, 0.6]).unwrap();
        let report = check_information_processing(&q, &constant).unwrap();
        assert!(report.comparisons.iter().all(|c| c.processed.abs() < 1e-12));
    }

    #[test]
    fn random_post_processing() {
        let mut rng = RngStream::new(42, 0).rng();
        for _ in 0..100 {
            let q =
                DiscreteChannel::from_fn(labels(2), 2, labels(3), |_| stochastic_row(&mut rng, 3))
                    .unwrap();
            let post =
                DiscreteChannel::from_fn(labels(3), 1, labels(4), |_| stochastic_row(&mut rng, 4))
                    .unwrap();
            assert!(check_information_processing(&q, &post).unwrap().holds);
        }
    }

    #[test]
    fn domain_mismatch() {
        let q = DiscreteChannel::identity(labels(3)).unwrap();
        let post = DiscreteChannel::identity(labels(2)).unwrap();
        assert!(check_information_processing(&q, &post).is_err());
    }
}
