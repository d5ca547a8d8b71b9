use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::rng::{laplace, standard_normal};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismVariant {
    /// Gaussian noise with variance `2T²/(n²ε_KL)` per coordinate; ε_KL-KL private.
    KlGaussian,
    /// Gaussian noise with variance `2T² log(1/δ)/(n²ε²)` per coordinate.
    ApproxDpGaussian,
    /// Independent Laplace coordinates with rate `κ = εn/(2T√d)`; smooth DP.
    SmoothDpLaplace,
}

impl MechanismVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            MechanismVariant::KlGaussian => "kl-gaussian",
            MechanismVariant::ApproxDpGaussian => "approx-dp-gaussian",
            MechanismVariant::SmoothDpLaplace => "smooth-dp-laplace",
        }
    }
}

/// Parameters of the truncated-mean estimator.
///
/// `k_moments` may be `+∞` (bounded data), in which case the default
/// truncation radius is `r`. `T` overrides the variant's default radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismSpec {
    pub variant: MechanismVariant,
    pub r: f64,
    #[serde(with = "crate::extended")]
    pub k_moments: f64,
    pub d: usize,
    pub n: usize,
    #[serde(with = "crate::extended")]
    pub eps: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_kl: Option<f64>,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<f64>,
}

/// Distribution of the additive noise vector `W` (i.i.d. coordinates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    Gaussian { sigma: f64 },
    Laplace { scale: f64 },
}

impl NoiseModel {
    /// `E‖W‖²` for a `d`-dimensional draw.
    pub fn second_moment(&self, d: usize) -> f64 {
        let per_coordinate = match *self {
            NoiseModel::Gaussian { sigma } => sigma * sigma,
            NoiseModel::Laplace { scale } => 2.0 * scale * scale,
        };
        d as f64 * per_coordinate
    }

    fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::Gaussian { sigma: 0.0 } => 0.0,
            NoiseModel::Gaussian { sigma } => sigma * standard_normal(rng),
            NoiseModel::Laplace { scale: 0.0 } => 0.0,
            NoiseModel::Laplace { scale } => laplace(rng, scale),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(Error::spec(format!("{name} must be positive, got {v}")))
    }
}

impl MechanismSpec {
    /// Smooth-DP Laplace spec with bounded data (`k = ∞`) and default radius.
    pub fn smooth_dp_laplace(r: f64, d: usize, n: usize, eps: f64) -> Self {
        MechanismSpec {
            variant: MechanismVariant::SmoothDpLaplace,
            r,
            k_moments: f64::INFINITY,
            d,
            n,
            eps,
            delta: None,
            eps_kl: None,
            truncation: None,
        }
    }

    /// KL-Gaussian spec with bounded data (`k = ∞`); `eps` doubles as `eps_kl`.
    pub fn kl_gaussian(r: f64, d: usize, n: usize, eps_kl: f64) -> Self {
        MechanismSpec {
            variant: MechanismVariant::KlGaussian,
            eps_kl: Some(eps_kl),
            ..Self::smooth_dp_laplace(r, d, n, eps_kl)
        }
    }

    /// Approximate-DP Gaussian spec with bounded data (`k = ∞`).
    pub fn approx_dp_gaussian(r: f64, d: usize, n: usize, eps: f64, delta: f64) -> Self {
        MechanismSpec {
            variant: MechanismVariant::ApproxDpGaussian,
            delta: Some(delta),
            ..Self::smooth_dp_laplace(r, d, n, eps)
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("r", self.r)?;
        if !(self.k_moments > 1.0) {
            return Err(Error::spec(format!(
                "k_moments must exceed 1, got {}",
                self.k_moments
            )));
        }
        if self.d == 0 || self.n == 0 {
            return Err(Error::spec("d and n must be at least 1"));
        }
        positive("eps", self.eps)?;
        match (self.variant, self.delta) {
            (MechanismVariant::ApproxDpGaussian, Some(delta)) if delta > 0.0 && delta < 1.0 => {}
            (MechanismVariant::ApproxDpGaussian, _) => {
                return Err(Error::spec("approx-dp-gaussian needs delta in (0, 1)"))
            }
            (_, Some(_)) => {
                return Err(Error::spec(
                    "delta is only meaningful for approx-dp-gaussian",
                ))
            }
            _ => {}
        }
        match (self.variant, self.eps_kl) {
            (MechanismVariant::KlGaussian, Some(e)) => positive("eps_kl", e)?,
            (MechanismVariant::KlGaussian, None) => {
                return Err(Error::spec("kl-gaussian needs eps_kl"))
            }
            (_, Some(_)) => return Err(Error::spec("eps_kl is only meaningful for kl-gaussian")),
            _ => {}
        }
        if let Some(t) = self.truncation {
            positive("T", t)?;
        }
        Ok(())
    }

    /// `T`: the override if present, else the variant's default radius.
    pub fn truncation_radius(&self) -> f64 {
        if let Some(t) = self.truncation {
            return t;
        }
        if self.k_moments.is_infinite() {
            return self.r;
        }
        let (n, d, k) = (self.n as f64, self.d as f64, self.k_moments);
        let base = match self.variant {
            MechanismVariant::KlGaussian => n * n * self.eps_kl.unwrap_or(f64::NAN) / d,
            MechanismVariant::ApproxDpGaussian => {
                let delta = self.delta.unwrap_or(f64::NAN);
                n * n * self.eps * self.eps / (d * (1.0 / delta).ln())
            }
            MechanismVariant::SmoothDpLaplace => (n * self.eps / d).powi(2),
        };
        self.r * base.powf(1.0 / (2.0 * k))
    }

    pub fn noise(&self) -> NoiseModel {
        let t = self.truncation_radius();
        let n = self.n as f64;
        match self.variant {
            MechanismVariant::KlGaussian => {
                let eps_kl = self.eps_kl.unwrap_or(f64::NAN);
                NoiseModel::Gaussian {
                    sigma: (2.0 * t * t / (n * n * eps_kl)).sqrt(),
                }
            }
            MechanismVariant::ApproxDpGaussian => {
                let log_inv_delta = (1.0 / self.delta.unwrap_or(f64::NAN)).ln();
                NoiseModel::Gaussian {
                    sigma: (2.0 * t * t * log_inv_delta / (n * n * self.eps * self.eps)).sqrt(),
                }
            }
            MechanismVariant::SmoothDpLaplace => NoiseModel::Laplace {
                scale: 1.0 / self.laplace_rate(),
            },
        }
    }

    /// `κ = εn/(2T√d)`, the Laplace rate of the smooth-DP variant.
    pub fn laplace_rate(&self) -> f64 {
        self.eps * self.n as f64 / (2.0 * self.truncation_radius() * (self.d as f64).sqrt())
    }

    fn check_sample(&self, sample: &[Vec<f64>]) -> Result<()> {
        if sample.len() != self.n {
            return Err(Error::domain(format!(
                "sample has {} points, spec expects n = {}",
                sample.len(),
                self.n
            )));
        }
        if let Some(x) = sample.iter().find(|x| x.len() != self.d) {
            return Err(Error::domain(format!(
                "point of dimension {} in a d = {} spec",
                x.len(),
                self.d
            )));
        }
        Ok(())
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Euclidean projection onto the ball of radius `t`.
pub fn truncate_project(x: &[f64], t: f64) -> Vec<f64> {
    let nx = norm(x);
    if nx <= t {
        x.to_vec()
    } else {
        x.iter().map(|v| v * t / nx).collect()
    }
}

fn projected_mean(sample: &[Vec<f64>], t: f64, d: usize) -> Vec<f64> {
    let mut mean = vec![0.0; d];
    for x in sample {
        for (m, v) in mean.iter_mut().zip(truncate_project(x, t)) {
            *m += v;
        }
    }
    let n = sample.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// `(1/n) Σ π_T(x_i) + W` with one fresh draw of the variant's noise.
pub fn truncated_mean<R: RngCore + ?Sized>(
    sample: &[Vec<f64>],
    spec: &MechanismSpec,
    rng: &mut R,
) -> Result<Vec<f64>> {
    spec.validate()?;
    spec.check_sample(sample)?;
    let noise = spec.noise();
    let mut out = projected_mean(sample, spec.truncation_radius(), spec.d);
    for v in out.iter_mut() {
        *v += noise.draw(rng);
    }
    Ok(out)
}

/// Diagnostic mode: `(1/n) Σ π_T(x_i)` with no noise. **Not private**; exists
/// so tests and risk baselines can isolate the truncation step.
pub fn truncated_mean_without_noise(sample: &[Vec<f64>], spec: &MechanismSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    spec.check_sample(sample)?;
    Ok(projected_mean(sample, spec.truncation_radius(), spec.d))
}

fn check_pair(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<()> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::domain(format!(
            "samples of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let d = a[0].len();
    if a.iter().chain(b).any(|x| x.len() != d) {
        return Err(Error::domain("points of differing dimension"));
    }
    Ok(())
}

/// `‖v − v′‖₂` between the truncated means of two equal-length samples.
pub fn mean_sensitivity(a: &[Vec<f64>], b: &[Vec<f64>], t: f64) -> Result<f64> {
    check_pair(a, b)?;
    let d = a[0].len();
    let (va, vb) = (projected_mean(a, t, d), projected_mean(b, t, d));
    Ok(va
        .iter()
        .zip(&vb)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// `d_ρ(a, b) = (1/2T) Σ min(‖a_i − b_i‖₂, 2T)`.
pub fn smooth_metric_distance(a: &[Vec<f64>], b: &[Vec<f64>], t: f64) -> Result<f64> {
    check_pair(a, b)?;
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| {
            let dist = x
                .iter()
                .zip(y)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            dist.min(2.0 * t)
        })
        .sum::<f64>()
        / (2.0 * t))
}

/// Exact KL between the two Gaussian output laws `N(v, σ²I)` and `N(v′, σ²I)`.
pub fn gaussian_output_kl(spec: &MechanismSpec, a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    spec.validate()?;
    spec.check_sample(a)?;
    spec.check_sample(b)?;
    let sigma = match spec.noise() {
        NoiseModel::Gaussian { sigma } => sigma,
        NoiseModel::Laplace { .. } => {
            return Err(Error::spec("gaussian_output_kl needs a Gaussian variant"))
        }
    };
    let s = mean_sensitivity(a, b, spec.truncation_radius())?;
    Ok(s * s / (2.0 * sigma * sigma))
}

fn laplace_rate_of(spec: &MechanismSpec) -> Result<f64> {
    spec.validate()?;
    if spec.variant != MechanismVariant::SmoothDpLaplace {
        return Err(Error::spec(
            "Laplace density ratio needs the smooth-dp-laplace variant",
        ));
    }
    Ok(spec.laplace_rate())
}

/// `log p(z | a) − log p(z | b)` for the smooth-DP Laplace mechanism.
pub fn laplace_log_density_ratio(
    spec: &MechanismSpec,
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    z: &[f64],
) -> Result<f64> {
    let kappa = laplace_rate_of(spec)?;
    spec.check_sample(a)?;
    spec.check_sample(b)?;
    if z.len() != spec.d {
        return Err(Error::domain("output point has the wrong dimension"));
    }
    let t = spec.truncation_radius();
    let (va, vb) = (projected_mean(a, t, spec.d), projected_mean(b, t, spec.d));
    let l1 = |v: &[f64]| v.iter().zip(z).map(|(x, y)| (x - y).abs()).sum::<f64>();
    Ok(kappa * (l1(&vb) - l1(&va)))
}

/// `sup_z |log p(z | a) − log p(z | b)| = κ ‖v − v′‖₁`.
pub fn laplace_max_log_ratio(spec: &MechanismSpec, a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let kappa = laplace_rate_of(spec)?;
    spec.check_sample(a)?;
    spec.check_sample(b)?;
    let t = spec.truncation_radius();
    let (va, vb) = (projected_mean(a, t, spec.d), projected_mean(b, t, spec.d));
    Ok(kappa * va.iter().zip(&vb).map(|(x, y)| (x - y).abs()).sum::<f64>())
}
