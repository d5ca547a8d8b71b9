use libm::erfc;
use serde::Serialize;

use crate::mechanisms::{MechanismSpec, MechanismVariant, NoiseModel};
use crate::{Error, Result, VERDICT_SLACK};

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Exact `δ(ε)` of the Gaussian mechanism with ℓ2 sensitivity `Δ` and noise
/// scale `σ`: `Φ(Δ/2σ − εσ/Δ) − e^ε Φ(−Δ/2σ − εσ/Δ)`.
pub fn gaussian_delta_profile(sensitivity: f64, sigma: f64, eps: f64) -> f64 {
    if sensitivity == 0.0 || eps.is_infinite() {
        return 0.0;
    }
    let a = sensitivity / (2.0 * sigma);
    let b = eps * sigma / sensitivity;
    let tail = std_normal_cdf(-a - b);
    let second = if tail == 0.0 {
        0.0
    } else {
        (eps + tail.ln()).exp()
    };
    (std_normal_cdf(a - b) - second).max(0.0)
}

/// Achieved δ of the approximate-DP Gaussian truncated mean against the δ it
/// was configured with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianDeltaReport {
    pub sensitivity: f64,
    pub sigma: f64,
    pub eps: f64,
    pub requested_delta: f64,
    pub achieved_delta: f64,
    pub sufficient: bool,
}

/// Evaluates the exact privacy profile at the configured ε for worst-case
/// neighbours (`‖v − v′‖₂ = 2T/n`).
pub fn approx_dp_gaussian_report(spec: &MechanismSpec) -> Result<GaussianDeltaReport> {
    spec.validate()?;
    if spec.variant != MechanismVariant::ApproxDpGaussian {
        return Err(Error::spec(
            "report applies to the approx-dp-gaussian variant",
        ));
    }
    let sigma = match spec.noise() {
        NoiseModel::Gaussian { sigma } => sigma,
        NoiseModel::Laplace { .. } => unreachable!("approx-dp-gaussian draws Gaussian noise"),
    };
    let sensitivity = 2.0 * spec.truncation_radius() / spec.n as f64;
    let requested_delta = spec.delta.unwrap_or_default();
    let achieved_delta = gaussian_delta_profile(sensitivity, sigma, spec.eps);
    Ok(GaussianDeltaReport {
        sensitivity,
        sigma,
        eps: spec.eps,
        requested_delta,
        achieved_delta,
        sufficient: achieved_delta <= requested_delta + VERDICT_SLACK,
    })
}
