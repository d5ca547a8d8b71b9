use rand::RngCore;
use serde::Serialize;

use crate::rng::in_ball;

/// Minimum pairwise distance required between packing points.
pub const PACKING_SEPARATION: f64 = 0.5;

/// Uniform probes used to certify that a packing is maximal.
pub const PACKING_PROBES: usize = 100_000;

/// A 1/2-separated subset of the unit ball, maximal in the sense that a
/// certification pass of uniform probes found every probe within 1/2 of some
/// point. Maximality makes it a 1/2-cover, hence `|V| ≥ 2^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingSet {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
    /// Smallest pairwise distance (`+∞` for a single point).
    pub separation: f64,
    /// Points added during certification because a probe was uncovered.
    pub certification_insertions: usize,
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn far_from_all(points: &[Vec<f64>], x: &[f64]) -> bool {
    let s2 = PACKING_SEPARATION * PACKING_SEPARATION;
    points.iter().all(|p| dist_sq(p, x) >= s2)
}

/// Randomized greedy packing: uniform candidates from the unit ball are kept
/// when at least 1/2 away from every kept point, until `200·2^d` consecutive
/// candidates are rejected. A certification pass with
/// [`PACKING_PROBES`] probes then inserts any uncovered probe and repeats
/// until a full pass finds none.
pub fn greedy_packing<R: RngCore + ?Sized>(d: usize, rng: &mut R) -> PackingSet {
    let d = d.max(1);
    let budget = 200usize.saturating_mul(1usize.checked_shl(d as u32).unwrap_or(usize::MAX));
    let mut points: Vec<Vec<f64>> = vec![in_ball(rng, d, 1.0)];
    let mut rejections = 0;
    while rejections < budget {
        let x = in_ball(rng, d, 1.0);
        if far_from_all(&points, &x) {
            points.push(x);
            rejections = 0;
        } else {
            rejections += 1;
        }
    }
    let mut certification_insertions = 0;
    loop {
        let mut clean = true;
        for _ in 0..PACKING_PROBES {
            let x = in_ball(rng, d, 1.0);
            if far_from_all(&points, &x) {
                points.push(x);
                certification_insertions += 1;
                clean = false;
            }
        }
        if clean {
            break;
        }
    }
    let mut separation = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            separation = separation.min(dist_sq(&points[i], &points[j]).sqrt());
        }
    }
    PackingSet {
        d,
        points,
        separation,
        certification_insertions,
    }
}
