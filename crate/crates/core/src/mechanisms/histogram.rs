use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::rng::laplace;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HistogramDomain {
    /// `[0, 1]^d`.
    #[default]
    UnitCube,
}

/// Equal-width histogram on the unit cube with `k_bins` bins per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSpec {
    pub d: usize,
    pub k_bins: usize,
    #[serde(with = "crate::extended")]
    pub eps: f64,
    #[serde(default)]
    pub domain: HistogramDomain,
}

impl HistogramSpec {
    pub fn new(d: usize, k_bins: usize, eps: f64) -> Self {
        HistogramSpec {
            d,
            k_bins,
            eps,
            domain: HistogramDomain::UnitCube,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.d) {
            return Err(Error::spec(format!(
                "histogram supports d = 1 or 2, got {}",
                self.d
            )));
        }
        if self.k_bins == 0 {
            return Err(Error::spec("k_bins must be at least 1"));
        }
        if !(self.eps > 0.0) {
            return Err(Error::spec(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        Ok(())
    }

    /// Total number of cells, `k_bins^d`.
    pub fn total_bins(&self) -> usize {
        self.k_bins.pow(self.d as u32)
    }

    /// Laplace scale added to every bin frequency: `2/(nε)`.
    pub fn noise_scale(&self, n: usize) -> f64 {
        2.0 / (n as f64 * self.eps)
    }
}

/// Piecewise-constant density estimate; `heights` are stored in row-major
/// order with the first coordinate most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramEstimate {
    pub d: usize,
    pub k_bins: usize,
    pub heights: Vec<f64>,
}

impl HistogramEstimate {
    fn cell_of(&self, point: &[f64]) -> Result<usize> {
        if point.len() != self.d {
            return Err(Error::domain(format!(
                "point of dimension {} in a d = {} histogram",
                point.len(),
                self.d
            )));
        }
        let mut index = 0;
        for &x in point {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::domain(format!("coordinate {x} outside [0, 1]")));
            }
            let b = ((x * self.k_bins as f64) as usize).min(self.k_bins - 1);
            index = index * self.k_bins + b;
        }
        Ok(index)
    }

    /// Height of the bin containing `point`.
    pub fn evaluate(&self, point: &[f64]) -> Result<f64> {
        Ok(self.heights[self.cell_of(point)?])
    }

    /// `∫ (f̂ − f)²`, given `∫_cell f` for every cell (same ordering as
    /// `heights`) and `∫ f²`.
    pub fn squared_l2_error(
        &self,
        cell_integrals: &[f64],
        density_sq_integral: f64,
    ) -> Result<f64> {
        if cell_integrals.len() != self.heights.len() {
            return Err(Error::domain("one integral per cell is required"));
        }
        let volume = 1.0 / self.heights.len() as f64;
        let cross: f64 = self
            .heights
            .iter()
            .zip(cell_integrals)
            .map(|(h, m)| h * h * volume - 2.0 * h * m)
            .sum();
        Ok((cross + density_sq_integral).max(0.0))
    }
}

fn counts(sample: &[Vec<f64>], spec: &HistogramSpec) -> Result<HistogramEstimate> {
    spec.validate()?;
    if sample.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    let mut est = HistogramEstimate {
        d: spec.d,
        k_bins: spec.k_bins,
        heights: vec![0.0; spec.total_bins()],
    };
    let total = spec.total_bins() as f64;
    let n = sample.len() as f64;
    let mut tally = vec![0usize; est.heights.len()];
    for x in sample {
        tally[est.cell_of(x)?] += 1;
    }
    for (h, c) in est.heights.iter_mut().zip(tally) {
        *h = total * c as f64 / n;
    }
    Ok(est)
}

/// Histogram with no noise (the `ε → ∞` limit).
pub fn plain_histogram(sample: &[Vec<f64>], spec: &HistogramSpec) -> Result<HistogramEstimate> {
    counts(
        sample,
        &HistogramSpec {
            eps: f64::INFINITY,
            ..spec.clone()
        },
    )
}

/// ε-DP histogram: heights `k_total (count_j/n + L_j)` with `L_j` iid
/// Laplace of scale `2/(nε)`.
pub fn private_histogram<R: RngCore + ?Sized>(
    sample: &[Vec<f64>],
    spec: &HistogramSpec,
    rng: &mut R,
) -> Result<HistogramEstimate> {
    let mut est = counts(sample, spec)?;
    let scale = spec.noise_scale(sample.len());
    if scale > 0.0 {
        let total = spec.total_bins() as f64;
        for h in est.heights.iter_mut() {
            *h += total * laplace(rng, scale);
        }
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{uniform_in, RngStream};

    #[test]
    fn single_bin_uniform() {
        let mut rng = RngStream::new(3, 0).rng();
        let sample: Vec<Vec<f64>> = (0..1000)
            .map(|_| vec![uniform_in(&mut rng, 0.0, 1.0)])
            .collect();
        let est = plain_histogram(&sample, &HistogramSpec::new(1, 1, 1.0)).unwrap();
        assert_eq!(est.heights, vec![1.0]);
    }

    #[test]
    fn infinite_eps_is_plain() {
        let sample = vec![vec![0.1, 0.9], vec![0.6, 0.2], vec![1.0, 1.0]];
        let spec = HistogramSpec::new(2, 2, f64::INFINITY);
        let mut rng = RngStream::new(0, 0).rng();
        let a = private_histogram(&sample, &spec, &mut rng).unwrap();
        let b = plain_histogram(&sample, &spec).unwrap();
        assert_eq!(a, b);
        // cells (0,1), (1,0), (1,1) each hold one of three points, height 4/3
        assert_eq!(b.heights, vec![0.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0]);
        assert_eq!(b.evaluate(&[0.7, 0.7]).unwrap(), 4.0 / 3.0);
    }

    #[test]
    fn outside_cube() {
        let spec = HistogramSpec::new(1, 4, 1.0);
        assert!(matches!(
            plain_histogram(&[vec![1.2]], &spec),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            plain_histogram(&[vec![-0.1]], &spec),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn squared_error_of_exact_uniform_estimate() {
        let est = HistogramEstimate {
            d: 1,
            k_bins: 4,
            heights: vec![1.0; 4],
        };
        assert!(est.squared_l2_error(&[0.25; 4], 1.0).unwrap() < 1e-15);
        let est = HistogramEstimate {
            d: 1,
            k_bins: 2,
            heights: vec![2.0, 0.0],
        };
        assert!((est.squared_l2_error(&[0.5, 0.5], 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = HistogramSpec::new(1, 8, 1.0);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"d":1,"k_bins":8,"eps":1.0,"domain":"unit-cube"}"#);
        assert_eq!(serde_json::from_str::<HistogramSpec>(&text).unwrap(), spec);
        assert!(
            serde_json::from_str::<HistogramSpec>(r#"{"d":1,"k_bins":8,"eps":1,"bins":3}"#)
                .is_err()
        );
    }
}
