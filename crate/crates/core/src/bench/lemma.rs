use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use crate::mechanisms::truncate_project;
use crate::rng::{on_sphere, RngStream};

pub const LEMMA_CONFIGS: usize = 20;
pub const LEMMA_DRAWS: usize = 100_000;

/// One configuration of the truncation-lemma checks.
///
/// The data law is discrete with `E‖X‖^k = r^k` exactly. The bias check is
/// `‖mean(π_T(X_i)) − E X‖ ≤ r^k/((k−1)T^{k−1}) + 4·stderr`; the variance
/// check is `E‖π_T(X) − Eπ_T(X)‖² ≤ E‖X − EX‖² + 4·stderr`, with the
/// left-hand sides estimated from the draws and the right-hand sides exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub index: usize,
    pub kind: String,
    pub d: usize,
    pub k: f64,
    pub r: f64,
    pub t: f64,
    pub bias_norm: f64,
    pub bias_stderr: f64,
    pub bias_bound: f64,
    pub exact_bias_norm: f64,
    pub bias_ok: bool,
    pub projected_variance: f64,
    pub variance_stderr: f64,
    pub original_variance: f64,
    pub variance_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSuiteReport {
    pub seed: u64,
    pub draws: usize,
    pub checks: Vec<LemmaCheck>,
    pub passed: bool,
}

struct Atoms {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl Atoms {
    /// Rescales all atoms so that `E‖X‖^k = r^k`.
    fn normalized(mut self, k: f64, r: f64) -> Self {
        let moment: f64 = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * norm(x).powf(k))
            .sum();
        let s = r / moment.powf(1.0 / k);
        self.points
            .iter_mut()
            .for_each(|x| x.iter_mut().for_each(|v| *v *= s));
        self
    }

    fn mean_of<F: Fn(&[f64]) -> Vec<f64>>(&self, f: F, d: usize) -> Vec<f64> {
        let mut m = vec![0.0; d];
        for (x, w) in self.points.iter().zip(&self.weights) {
            for (mi, v) in m.iter_mut().zip(f(x)) {
                *mi += w * v;
            }
        }
        m
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn configuration<R: Rng>(index: usize, rng: &mut R) -> (String, usize, f64, f64, f64, Atoms) {
    let d = rng.random_range(1..=4);
    let k = [1.5, 2.0, 3.0, 4.0, 6.0][rng.random_range(0..5)];
    let r = rng.random_range(0.5..2.0);
    match index % 4 {
        0 => {
            let atoms = Atoms {
                points: vec![on_sphere(rng, d, 1.0)],
                weights: vec![1.0],
            }
            .normalized(k, r);
            (
                "point-mass".into(),
                d,
                k,
                r,
                r * rng.random_range(1.0..2.0),
                atoms,
            )
        }
        1 => {
            let m = rng.random_range(2..=5);
            let points = (0..m)
                .map(|_| {
                    let radius = rng.random_range(0.1..3.0);
                    on_sphere(rng, d, radius)
                })
                .collect();
            let weights = (0..m)
                .map(|_| rng.random_range(0.05..1.0))
                .collect::<Vec<f64>>();
            let total: f64 = weights.iter().sum();
            let atoms = Atoms {
                points,
                weights: weights.iter().map(|w| w / total).collect(),
            }
            .normalized(k, r);
            (
                "random-atoms".into(),
                d,
                k,
                r,
                r * rng.random_range(0.3..3.0),
                atoms,
            )
        }
        2 => {
            let delta: f64 = rng.random_range(0.01..0.1);
            let u = on_sphere(rng, d, 1.0);
            let atoms = Atoms {
                points: vec![
                    u.iter().map(|v| v * r * delta.powf(-1.0 / k)).collect(),
                    vec![0.0; d],
                ],
                weights: vec![delta, 1.0 - delta],
            };
            (
                "heavy-two-point".into(),
                d,
                k,
                r,
                r * rng.random_range(0.3..1.0),
                atoms,
            )
        }
        _ => {
            let points = (0..3)
                .map(|_| {
                    let radius = rng.random_range(0.2..2.0);
                    on_sphere(rng, d, radius)
                })
                .collect();
            let atoms = Atoms {
                points,
                weights: vec![0.2, 0.3, 0.5],
            }
            .normalized(k, r);
            ("huge-radius".into(), d, k, r, 100.0 * r, atoms)
        }
    }
}

fn run_check(index: usize, master_seed: u64, draws: usize) -> LemmaCheck {
    let mut rng = RngStream::new(master_seed, index as u64).rng();
    let (kind, d, k, r, t, atoms) = configuration(index, &mut rng);
    let picker = WeightedIndex::new(&atoms.weights).expect("weights are positive");
    let projected: Vec<Vec<f64>> = (0..atoms.points.len())
        .map(|j| truncate_project(&atoms.points[j], t))
        .collect();

    let mut sum = vec![0.0; d];
    let mut sum_sq = vec![0.0; d];
    let mut draws_idx = Vec::with_capacity(draws);
    for _ in 0..draws {
        let j = picker.sample(&mut rng);
        draws_idx.push(j);
        for (i, v) in projected[j].iter().enumerate() {
            sum[i] += v;
            sum_sq[i] += v * v;
        }
    }
    let nd = draws as f64;
    let emp_mean: Vec<f64> = sum.iter().map(|s| s / nd).collect();
    let true_mean = atoms.mean_of(|x| x.to_vec(), d);
    let exact_projected_mean = atoms.mean_of(|x| truncate_project(x, t), d);
    let bias_norm = dist_sq(&emp_mean, &true_mean).sqrt();
    let coord_var: f64 = sum_sq
        .iter()
        .zip(&emp_mean)
        .map(|(s, m)| (s / nd - m * m).max(0.0))
        .sum();
    let bias_stderr = (coord_var * nd / (nd - 1.0) / nd).sqrt();
    let bias_bound = r.powf(k) / ((k - 1.0) * t.powf(k - 1.0));

    let deviations: Vec<f64> = draws_idx
        .iter()
        .map(|&j| dist_sq(&projected[j], &emp_mean))
        .collect();
    let dev_mean = deviations.iter().sum::<f64>() / nd;
    let projected_variance = dev_mean * nd / (nd - 1.0);
    let dev_var = deviations
        .iter()
        .map(|v| (v - dev_mean) * (v - dev_mean))
        .sum::<f64>()
        / (nd - 1.0);
    let variance_stderr = (dev_var / nd).sqrt();
    let original_variance: f64 = atoms
        .points
        .iter()
        .zip(&atoms.weights)
        .map(|(x, w)| w * dist_sq(x, &true_mean))
        .sum();

    // Summation error floor; the point-mass cases have zero true variance.
    let roundoff = 1e-12 * (1.0 + t * t);

    LemmaCheck {
        index,
        kind,
        d,
        k,
        r,
        t,
        bias_norm,
        bias_stderr,
        bias_bound,
        exact_bias_norm: dist_sq(&exact_projected_mean, &true_mean).sqrt(),
        bias_ok: bias_norm <= bias_bound + 4.0 * bias_stderr + roundoff.sqrt(),
        projected_variance,
        variance_stderr,
        original_variance,
        variance_ok: projected_variance <= original_variance + 4.0 * variance_stderr + roundoff,
    }
}

/// Runs the truncation-bias and projection-variance checks on
/// [`LEMMA_CONFIGS`] seeded configurations with [`LEMMA_DRAWS`] draws each.
pub fn lemma_property_suite(master_seed: u64) -> LemmaSuiteReport {
    let checks: Vec<LemmaCheck> = (0..LEMMA_CONFIGS)
        .map(|i| run_check(i, master_seed, LEMMA_DRAWS))
        .collect();
    let passed = checks.iter().all(|c| c.bias_ok && c.variance_ok);
    LemmaSuiteReport {
        seed: master_seed,
        draws: LEMMA_DRAWS,
        checks,
        passed,
    }
}
