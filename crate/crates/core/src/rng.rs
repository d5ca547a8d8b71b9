//! Reproducible random streams and the noise primitives built on them.
//!
//! A stream is a ChaCha8 generator keyed by the master seed with the stream
//! index selecting an independent ChaCha stream, so a given
//! `(master_seed, stream_index)` reproduces the same draws whatever the
//! scheduling of other streams.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        RngStream {
            master_seed,
            stream_index,
        }
    }

    /// Stream for replication `rep` at grid point `grid`.
    pub fn for_task(master_seed: u64, grid: u32, rep: u32) -> Self {
        RngStream::new(master_seed, (u64::from(grid) << 32) | u64::from(rep))
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

/// Uniform on the open interval `(0, 1)`, from the top 53 bits of one word.
pub fn open_unit<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u > 0.0 {
            return u;
        }
    }
}

/// Standard normal by the cosine branch of Box–Muller (two uniforms per draw).
pub fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let u1 = open_unit(rng);
    let u2 = open_unit(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Laplace with the given scale (density `∝ exp(−|w|/scale)`), by inverse CDF
/// from a single uniform.
pub fn laplace<R: RngCore + ?Sized>(rng: &mut R, scale: f64) -> f64 {
    let u = open_unit(rng) - 0.5;
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

/// Uniform point in `[lo, hi)`.
pub fn uniform_in<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Uniform point on the sphere of the given radius in `R^d`.
pub fn on_sphere<R: RngCore + ?Sized>(rng: &mut R, d: usize, radius: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| standard_normal(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x *= radius / norm);
            return v;
        }
    }
}

/// Uniform point in the closed ball of the given radius in `R^d`.
pub fn in_ball<R: RngCore + ?Sized>(rng: &mut R, d: usize, radius: f64) -> Vec<f64> {
    let r = radius * open_unit(rng).powf(1.0 / d as f64);
    on_sphere(rng, d, r)
}
