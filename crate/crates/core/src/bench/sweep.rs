use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::DistributionFamilySpec;
use super::fit::fit_exponent;
use crate::mechanisms::{
    plain_histogram, private_histogram, truncated_mean, truncated_mean_without_noise,
    HistogramSpec, MechanismSpec, MechanismVariant,
};
use crate::rng::RngStream;
use crate::{Error, Result};

/// Smallest replication count a sweep accepts.
pub const MIN_REPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMechanism {
    TruncatedMean(MechanismSpec),
    Histogram(HistogramSpec),
}

impl SweepMechanism {
    pub fn name(&self) -> &'static str {
        match self {
            SweepMechanism::TruncatedMean(_) => "truncated-mean",
            SweepMechanism::Histogram(_) => "histogram",
        }
    }

    pub fn variant(&self) -> &'static str {
        match self {
            SweepMechanism::TruncatedMean(spec) => spec.variant.as_str(),
            SweepMechanism::Histogram(_) => "laplace",
        }
    }

    fn dimension(&self) -> usize {
        match self {
            SweepMechanism::TruncatedMean(spec) => spec.d,
            SweepMechanism::Histogram(spec) => spec.d,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SweepMechanism::TruncatedMean(spec) => spec.validate(),
            SweepMechanism::Histogram(spec) => spec.validate(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    N,
    D,
    Eps,
    KBins,
}

/// One risk curve to measure. `n` is required for histograms unless the
/// sweep runs over `n`; for the truncated mean it defaults to the mechanism's `n`.
/// Sweeping `eps` on the KL variant moves `eps_kl` along with `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub mechanism: SweepMechanism,
    pub family: DistributionFamilySpec,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub reps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Diagnostic mode: run the estimators without noise. Not private.
    #[serde(default)]
    pub suppress_noise: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskPoint {
    #[serde(with = "crate::extended")]
    pub value: f64,
    pub n: usize,
    pub d: usize,
    #[serde(with = "crate::extended")]
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_bins: Option<usize>,
    pub reps: usize,
    pub risk_mean: f64,
    pub risk_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskCurve {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub mechanism: String,
    pub variant: String,
    pub family: String,
    pub axis: SweepAxis,
    #[serde(
        with = "crate::extended::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub k_moments: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub seed: u64,
    pub points: Vec<RiskPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fitted_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<(f64, f64)>,
}

/// `k/n + (a²/12)/k² + 8k²/(n²ε²)`: expected integrated squared error model
/// of the one-dimensional private histogram on `1 + a(x − ½)`.
pub fn histogram_risk_model(k: usize, n: usize, eps: f64, a: f64) -> f64 {
    let (k, n) = (k as f64, n as f64);
    k / n + a * a / 12.0 / (k * k) + 8.0 * k * k / (n * n * eps * eps)
}

struct GridPoint {
    mechanism: SweepMechanism,
    family: DistributionFamilySpec,
    n: usize,
    d: usize,
    eps: f64,
    k_bins: Option<usize>,
}

fn integral(axis: SweepAxis, v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v < 1e15 {
        Ok(v as usize)
    } else {
        Err(Error::spec(format!(
            "{axis:?} values must be positive integers, got {v}"
        )))
    }
}

impl Sweep {
    /// Checks every grid point without running anything.
    pub fn validate(&self) -> Result<()> {
        if self.reps < MIN_REPS {
            return Err(Error::spec(format!(
                "reps must be at least {MIN_REPS}, got {}",
                self.reps
            )));
        }
        if self.values.is_empty() {
            return Err(Error::spec("sweep grid is empty"));
        }
        if let Some((lo, hi)) = self.fit_window {
            let inside = self
                .values
                .iter()
                .filter(|v| **v >= lo && **v <= hi)
                .count();
            if inside < 4 {
                return Err(Error::spec(format!(
                    "fit window [{lo}, {hi}] holds {inside} grid points, need 4"
                )));
            }
        }
        for &v in &self.values {
            let point = self.grid_point(v)?;
            if let SweepMechanism::Histogram(spec) = &point.mechanism {
                if spec.d != 1 {
                    return Err(Error::spec("density risk is implemented for d = 1"));
                }
            }
        }
        Ok(())
    }

    fn grid_point(&self, value: f64) -> Result<GridPoint> {
        let mut mechanism = self.mechanism.clone();
        let mut family = self.family.clone();
        let mut n = match &mechanism {
            SweepMechanism::TruncatedMean(spec) => self.n.unwrap_or(spec.n),
            SweepMechanism::Histogram(_) => self.n.unwrap_or(0),
        };
        match (self.axis, &mut mechanism) {
            (SweepAxis::N, m) => {
                n = integral(self.axis, value)?;
                if let SweepMechanism::TruncatedMean(spec) = m {
                    spec.n = n;
                }
            }
            (SweepAxis::D, SweepMechanism::TruncatedMean(spec)) => {
                spec.d = integral(self.axis, value)?;
                family = family.with_dimension(spec.d);
            }
            (SweepAxis::D, SweepMechanism::Histogram(spec)) => spec.d = integral(self.axis, value)?,
            (SweepAxis::Eps, SweepMechanism::TruncatedMean(spec)) => {
                spec.eps = value;
                if spec.variant == MechanismVariant::KlGaussian {
                    spec.eps_kl = Some(value);
                }
            }
            (SweepAxis::Eps, SweepMechanism::Histogram(spec)) => spec.eps = value,
            (SweepAxis::KBins, SweepMechanism::Histogram(spec)) => {
                spec.k_bins = integral(self.axis, value)?
            }
            (SweepAxis::KBins, SweepMechanism::TruncatedMean(_)) => {
                return Err(Error::spec("k_bins can only be swept for histograms"))
            }
        }
        if n == 0 {
            return Err(Error::spec(
                "histogram sweeps need n unless sweeping over n",
            ));
        }
        if let SweepMechanism::TruncatedMean(spec) = &mut mechanism {
            spec.n = n;
        }
        mechanism.validate()?;
        family.validate()?;
        let (eps, k_bins) = match &mechanism {
            SweepMechanism::TruncatedMean(spec) => (spec.eps, None),
            SweepMechanism::Histogram(spec) => (spec.eps, Some(spec.k_bins)),
        };
        Ok(GridPoint {
            d: mechanism.dimension(),
            mechanism,
            family,
            n,
            eps,
            k_bins,
        })
    }
}

fn replicate(
    point: &GridPoint,
    suppress_noise: bool,
    stream: RngStream,
    target: &Target,
) -> Result<f64> {
    let mut rng = stream.rng();
    let sample = point.family.sample(&mut rng, point.n, point.d)?;
    match (&point.mechanism, target) {
        (SweepMechanism::TruncatedMean(spec), Target::Mean(mean)) => {
            let est = if suppress_noise {
                truncated_mean_without_noise(&sample, spec)?
            } else {
                truncated_mean(&sample, spec, &mut rng)?
            };
            Ok(est.iter().zip(mean).map(|(a, b)| (a - b) * (a - b)).sum())
        }
        (SweepMechanism::Histogram(spec), Target::Density { cells, square }) => {
            let est = if suppress_noise {
                plain_histogram(&sample, spec)?
            } else {
                private_histogram(&sample, spec, &mut rng)?
            };
            est.squared_l2_error(cells, *square)
        }
        _ => unreachable!("target built from the same mechanism"),
    }
}

enum Target {
    Mean(Vec<f64>),
    Density { cells: Vec<f64>, square: f64 },
}

/// Measures mean risk and its standard error at every grid value.
///
/// Replication `rep` at grid index `g` uses the stream
/// `RngStream::for_task(master_seed, g, rep)`; losses are collected in index
/// order before summation, so the result does not depend on the thread pool.
pub fn risk_sweep(sweep: &Sweep, master_seed: u64) -> Result<RiskCurve> {
    sweep.validate()?;
    let mut points = Vec::with_capacity(sweep.values.len());
    for (g, &value) in sweep.values.iter().enumerate() {
        let point = sweep.grid_point(value)?;
        let target = match &point.mechanism {
            SweepMechanism::TruncatedMean(_) => Target::Mean(point.family.mean(point.d)?),
            SweepMechanism::Histogram(spec) => {
                if spec.d != 1 {
                    return Err(Error::spec("density risk is implemented for d = 1"));
                }
                let (cells, square) = point.family.cell_integrals(spec.total_bins())?;
                Target::Density { cells, square }
            }
        };
        let losses = (0..sweep.reps)
            .into_par_iter()
            .map(|rep| {
                replicate(
                    &point,
                    sweep.suppress_noise,
                    RngStream::for_task(master_seed, g as u32, rep as u32),
                    &target,
                )
            })
            .collect::<Result<Vec<f64>>>()?;
        let reps = losses.len() as f64;
        let mean = losses.iter().sum::<f64>() / reps;
        let var = losses.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / (reps - 1.0);
        points.push(RiskPoint {
            value,
            n: point.n,
            d: point.d,
            eps: point.eps,
            k_bins: point.k_bins,
            reps: sweep.reps,
            risk_mean: mean,
            risk_stderr: (var / reps).sqrt(),
        });
    }
    let (k_moments, r, delta) = match &sweep.mechanism {
        SweepMechanism::TruncatedMean(spec) => (Some(spec.k_moments), Some(spec.r), spec.delta),
        SweepMechanism::Histogram(_) => (None, None, None),
    };
    let mut curve = RiskCurve {
        name: sweep.name.clone(),
        mechanism: sweep.mechanism.name().to_string(),
        variant: sweep.mechanism.variant().to_string(),
        family: sweep.family.name().to_string(),
        axis: sweep.axis,
        k_moments,
        r,
        delta,
        seed: master_seed,
        points,
        fitted_slope: None,
        fit_window: sweep.fit_window,
    };
    if let Some(window) = sweep.fit_window {
        curve.fitted_slope = Some(fit_exponent(&curve, window)?);
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball_sweep(variant: MechanismSpec, values: Vec<f64>, reps: usize) -> Sweep {
        Sweep {
            name: None,
            family: DistributionFamilySpec::BoundedBall {
                r: 1.0,
                d: variant.d,
            },
            mechanism: SweepMechanism::TruncatedMean(variant),
            axis: SweepAxis::N,
            values,
            reps,
            n: None,
            suppress_noise: false,
            fit_window: None,
        }
    }

    #[test]
    fn noiseless_risk_is_variance_over_n() {
        let mut sweep = ball_sweep(
            MechanismSpec::smooth_dp_laplace(1.0, 3, 10, 0.5),
            vec![10.0, 40.0],
            4000,
        );
        sweep.suppress_noise = true;
        let curve = risk_sweep(&sweep, 5).unwrap();
        for p in &curve.points {
            let expected = 1.0 / p.n as f64;
            assert!(
                (p.risk_mean - expected).abs() < 4.0 * p.risk_stderr,
                "{p:?}"
            );
        }
    }

    #[test]
    fn laplace_noise_second_moment() {
        let spec = MechanismSpec::smooth_dp_laplace(1.0, 4, 8, 0.5);
        let curve = risk_sweep(&ball_sweep(spec.clone(), vec![8.0], 4000), 6).unwrap();
        let p = &curve.points[0];
        let noise = spec.noise().second_moment(4);
        assert!((noise - 8.0 * 16.0 / (64.0 * 0.25)).abs() < 1e-12);
        let expected = noise + 1.0 / 8.0;
        assert!(
            (p.risk_mean - expected).abs() < 4.0 * p.risk_stderr,
            "{p:?} vs {expected}"
        );
    }

    #[test]
    fn huge_eps_is_nonprivate() {
        let mut sweep = ball_sweep(
            MechanismSpec::smooth_dp_laplace(1.0, 2, 20, 0.5),
            vec![f64::INFINITY],
            200,
        );
        sweep.axis = SweepAxis::Eps;
        let private = risk_sweep(&sweep, 7).unwrap();
        sweep.suppress_noise = true;
        let plain = risk_sweep(&sweep, 7).unwrap();
        assert_eq!(private.points[0].risk_mean, plain.points[0].risk_mean);
    }

    #[test]
    fn deterministic_across_pools() {
        let sweep = ball_sweep(
            MechanismSpec::kl_gaussian(1.0, 2, 10, 0.5),
            vec![4.0, 8.0],
            300,
        );
        let a = risk_sweep(&sweep, 11).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| risk_sweep(&sweep, 11).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_small_reps_and_bad_axes() {
        let sweep = ball_sweep(MechanismSpec::kl_gaussian(1.0, 2, 10, 0.5), vec![4.0], 50);
        assert!(matches!(risk_sweep(&sweep, 0), Err(Error::Spec(_))));
        let mut sweep = ball_sweep(MechanismSpec::kl_gaussian(1.0, 2, 10, 0.5), vec![4.5], 100);
        assert!(risk_sweep(&sweep, 0).is_err());
        sweep.axis = SweepAxis::KBins;
        sweep.values = vec![4.0];
        assert!(risk_sweep(&sweep, 0).is_err());
    }

    #[test]
    fn histogram_risk_near_model() {
        let sweep = Sweep {
            name: None,
            mechanism: SweepMechanism::Histogram(HistogramSpec::new(1, 4, 1.0)),
            family: DistributionFamilySpec::LipschitzDensity { a: 0.0 },
            axis: SweepAxis::KBins,
            values: vec![4.0],
            reps: 400,
            n: Some(2000),
            suppress_noise: false,
            fit_window: None,
        };
        let p = &risk_sweep(&sweep, 3).unwrap().points[0];
        // Uniform density: no bias; multinomial variance (k − 1)/n plus k²·8/(n²ε²).
        let expected = 3.0 / 2000.0 + 16.0 * 8.0 / (2000.0f64 * 2000.0);
        assert!(
            (p.risk_mean - expected).abs() < 4.0 * p.risk_stderr,
            "{p:?} vs {expected}"
        );
    }
}
