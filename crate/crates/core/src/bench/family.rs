use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::bounds::two_point_mean_construction;
use crate::rng::{on_sphere, open_unit};
use crate::{Error, Result};

/// Data-generating families for the risk harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionFamilySpec {
    /// Uniform on the sphere of radius `r` in `R^d`: mean zero, `‖X‖ = r`.
    /// This is the designated worst case for bounded data.
    BoundedBall { r: f64, d: usize },
    /// Mass `delta` at `r δ^{−1/k} e₁`, the rest at the origin, so that
    /// `E‖X‖^k = r^k`.
    TwoPoint {
        r: f64,
        #[serde(with = "crate::extended")]
        k: f64,
        delta: f64,
    },
    /// Density `1 + a(x − ½)` on `[0, 1]`, `|a| ≤ 1`.
    LipschitzDensity { a: f64 },
}

impl DistributionFamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            DistributionFamilySpec::BoundedBall { .. } => "bounded-ball",
            DistributionFamilySpec::TwoPoint { .. } => "two-point",
            DistributionFamilySpec::LipschitzDensity { .. } => "lipschitz-density",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionFamilySpec::BoundedBall { r, d } if r > 0.0 && d >= 1 => Ok(()),
            DistributionFamilySpec::TwoPoint { r, k, delta } => {
                two_point_mean_construction(r, k, delta).map(|_| ())
            }
            DistributionFamilySpec::LipschitzDensity { a } if (-1.0..=1.0).contains(&a) => Ok(()),
            _ => Err(Error::spec(format!("invalid family parameters: {self:?}"))),
        }
    }

    /// Dimension fixed by the family, if any.
    pub fn fixed_dimension(&self) -> Option<usize> {
        match *self {
            DistributionFamilySpec::BoundedBall { d, .. } => Some(d),
            DistributionFamilySpec::LipschitzDensity { .. } => Some(1),
            DistributionFamilySpec::TwoPoint { .. } => None,
        }
    }

    /// Same family in dimension `d` (only the bounded ball carries one).
    pub(crate) fn with_dimension(&self, d: usize) -> Self {
        match *self {
            DistributionFamilySpec::BoundedBall { r, .. } => {
                DistributionFamilySpec::BoundedBall { r, d }
            }
            ref other => other.clone(),
        }
    }

    /// Population mean in `R^d`.
    pub fn mean(&self, d: usize) -> Result<Vec<f64>> {
        let mut m = vec![0.0; d];
        match *self {
            DistributionFamilySpec::BoundedBall { .. } => {}
            DistributionFamilySpec::TwoPoint { r, k, delta } => {
                m[0] = two_point_mean_construction(r, k, delta)?.theta1
            }
            DistributionFamilySpec::LipschitzDensity { a } => m[0] = 0.5 + a / 12.0,
        }
        Ok(m)
    }

    /// `n` iid draws in `R^d`.
    pub fn sample<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
        n: usize,
        d: usize,
    ) -> Result<Vec<Vec<f64>>> {
        if let Some(fixed) = self.fixed_dimension() {
            if fixed != d {
                return Err(Error::domain(format!(
                    "{} family has d = {fixed}, requested {d}",
                    self.name()
                )));
            }
        }
        match *self {
            DistributionFamilySpec::BoundedBall { r, d } => {
                Ok((0..n).map(|_| on_sphere(rng, d, r)).collect())
            }
            DistributionFamilySpec::TwoPoint { r, k, delta } => {
                let atom = two_point_mean_construction(r, k, delta)?.atom;
                Ok((0..n)
                    .map(|_| {
                        let mut x = vec![0.0; d];
                        if open_unit(rng) < delta {
                            x[0] = atom;
                        }
                        x
                    })
                    .collect())
            }
            DistributionFamilySpec::LipschitzDensity { a } => Ok((0..n)
                .map(|_| vec![lipschitz_quantile(a, open_unit(rng))])
                .collect()),
        }
    }

    /// `∫_cell f` for each of the `k` equal cells of `[0, 1]` and `∫ f²`.
    pub fn cell_integrals(&self, k: usize) -> Result<(Vec<f64>, f64)> {
        let DistributionFamilySpec::LipschitzDensity { a } = *self else {
            return Err(Error::spec(format!(
                "{} has no density on the unit interval",
                self.name()
            )));
        };
        let cdf = |x: f64| x + 0.5 * a * (x * x - x);
        let cells = (0..k)
            .map(|j| cdf((j + 1) as f64 / k as f64) - cdf(j as f64 / k as f64))
            .collect();
        Ok((cells, 1.0 + a * a / 12.0))
    }
}

/// Inverse of `F(x) = x + (a/2)(x² − x)`, written to stay stable as `a → 0`.
fn lipschitz_quantile(a: f64, u: f64) -> f64 {
    let b = 1.0 - a / 2.0;
    2.0 * u / (b + (b * b + 2.0 * a * u).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn quantile_inverts_cdf() {
        for a in [-1.0, -0.3, 0.0, 0.8, 1.0] {
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                let u = x + 0.5 * a * (x * x - x);
                assert!((lipschitz_quantile(a, u) - x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sphere_draws_have_norm_r() {
        let fam = DistributionFamilySpec::BoundedBall { r: 2.0, d: 3 };
        let mut rng = RngStream::new(91, 0).rng();
        for x in fam.sample(&mut rng, 100, 3).unwrap() {
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 2.0).abs() < 1e-12);
        }
        assert!(fam.sample(&mut rng, 1, 4).is_err());
    }

    #[test]
    fn lipschitz_cells_sum_to_one() {
        let fam = DistributionFamilySpec::LipschitzDensity { a: 0.8 };
        let (cells, sq) = fam.cell_integrals(7).unwrap();
        assert!((cells.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((sq - (1.0 + 0.64 / 12.0)).abs() < 1e-15);
        let mut rng = RngStream::new(92, 0).rng();
        let draws = fam.sample(&mut rng, 200_000, 1).unwrap();
        let mean = draws.iter().map(|x| x[0]).sum::<f64>() / draws.len() as f64;
        assert!((mean - fam.mean(1).unwrap()[0]).abs() < 3e-3);
    }

    #[test]
    fn json_form() {
        let fam: DistributionFamilySpec =
            serde_json::from_str(r#"{"family":"two-point","r":1,"k":"inf","delta":0.1}"#).unwrap();
        assert_eq!(
            fam,
            DistributionFamilySpec::TwoPoint {
                r: 1.0,
                k: f64::INFINITY,
                delta: 0.1
            }
        );
        assert!(serde_json::from_str::<DistributionFamilySpec>(
            r#"{"family":"bounded-ball","r":1,"d":2,"x":0}"#
        )
        .is_err());
    }
}
