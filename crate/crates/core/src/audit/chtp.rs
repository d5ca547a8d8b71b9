use serde::Serialize;

use super::definitions::hockey_stick;
use super::outputs_of_mask;
use super::verdict::{PrivacyDefinition, PrivacyVerdict, Witness};
use crate::prob::DiscreteChannel;
use crate::{Error, Result, VERDICT_SLACK};

/// CHTP audits enumerate every output subset, so they refuse larger output sets.
pub const CHTP_OUTPUT_LIMIT: usize = 16;

/// Conditional hypothesis testing privacy at `(eps_ch, delta_ch)`.
///
/// For each neighbouring pair and each output set `A` carrying at least
/// `delta_ch` (and strictly positive) mass under both rows, the best test
/// conditioned on `θ ∈ A` has error sum `1 − TV(q(·|x, A), q(·|x′, A))`.
/// The verdict's `tight_param` is the largest such conditional TV; sets with
/// zero mass under either row are skipped since the conditional law is
/// undefined there.
pub fn audit_chtp(q: &DiscreteChannel, eps_ch: f64, delta_ch: f64) -> Result<PrivacyVerdict> {
    let m = q.output_set().len();
    if m > CHTP_OUTPUT_LIMIT {
        return Err(Error::resource(format!(
            "CHTP enumerates 2^|Θ| sets; |Θ| = {m} exceeds {CHTP_OUTPUT_LIMIT}"
        )));
    }
    if !(eps_ch >= 0.0 && delta_ch >= 0.0) {
        return Err(Error::spec("eps_ch and delta_ch must be nonnegative"));
    }
    let mut best: (f64, Option<(usize, usize, u64)>) = (0.0, None);
    let mut mass_x = vec![0.0; 1 << m];
    let mut mass_y = vec![0.0; 1 << m];
    for pair in q.neighbor_pairs() {
        let (p, r) = (q.row(pair.a), q.row(pair.b));
        for mask in 1usize..1 << m {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            mass_x[mask] = mass_x[rest] + p[low];
            mass_y[mask] = mass_y[rest] + r[low];
            let (pa, ra) = (mass_x[mask], mass_y[mask]);
            if pa <= 0.0 || ra <= 0.0 || pa.min(ra) < delta_ch {
                continue;
            }
            let tv = 0.5
                * (0..m)
                    .filter(|j| mask >> j & 1 == 1)
                    .map(|j| (p[j] / pa - r[j] / ra).abs())
                    .sum::<f64>();
            if tv > best.0 {
                best = (tv, Some((pair.a, pair.b, mask as u64)));
            }
        }
    }
    let w = best.1.map(|(x, y, mask)| Witness {
        datasets: [q.key(x), q.key(y)],
        outputs: outputs_of_mask(q, mask),
        description: format!(
            "conditional TV on A = {}; best conditional test error sum = {}",
            best.0,
            1.0 - best.0
        ),
    });
    Ok(PrivacyVerdict::new(
        PrivacyDefinition::Chtp,
        best.0,
        eps_ch,
        w,
    ))
}

/// `(ε, δ)`-DP implies CHTP at
/// `ε_CH = (1 + e^{−ε})(1 − e^{−2ε})`, `δ_CH = δ/(e^{2ε} − e^ε)`.
///
/// `eps = 0` is only accepted with `delta = 0` (the δ_CH formula divides by zero).
pub fn chtp_params_from_dp(eps: f64, delta: f64) -> Result<(f64, f64)> {
    if !(eps >= 0.0 && delta >= 0.0) {
        return Err(Error::spec(format!(
            "need eps ≥ 0 and delta ≥ 0, got ({eps}, {delta})"
        )));
    }
    if eps == 0.0 {
        return if delta == 0.0 {
            Ok((0.0, 0.0))
        } else {
            Err(Error::spec(
                "eps = 0 with delta > 0 has no CHTP counterpart",
            ))
        };
    }
    let eps_ch = (1.0 + (-eps).exp()) * -(-2.0 * eps).exp_m1();
    let delta_ch = if delta == 0.0 {
        0.0
    } else {
        delta / (eps.exp() * eps.exp_m1())
    };
    Ok((eps_ch, delta_ch))
}

/// CHTP at `(ε_CH, δ_CH)` with `ε_CH < 1` implies DP at
/// `ε = 2 log((1 + ε_CH)/(1 − ε_CH))`, `δ = δ_CH (1 + ε_CH)/(1 − ε_CH)`.
pub fn dp_params_from_chtp(eps_ch: f64, delta_ch: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&eps_ch) {
        return Err(Error::spec(format!(
            "eps_ch must lie in [0, 1), got {eps_ch}"
        )));
    }
    if !(delta_ch >= 0.0) {
        return Err(Error::spec(format!(
            "delta_ch must be nonnegative, got {delta_ch}"
        )));
    }
    let eps = 2.0 * (eps_ch.ln_1p() - (-eps_ch).ln_1p());
    Ok((eps, delta_ch * (1.0 + eps_ch) / (1.0 - eps_ch)))
}

/// Masses of the augmented sets under `Q̃ = Q × Uniform[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AugmentedMasses {
    pub b_given_x: f64,
    pub c_given_x: f64,
    pub b_given_x_prime: f64,
    pub c_given_x_prime: f64,
}

/// A less informative channel that breaks CHTP, built from an approximate-DP
/// violation.
///
/// The output is augmented with an independent `U ~ Uniform[0, 1]`. With `B`
/// the violating set and `C = B^c`, the conditioning set is
/// `Ã = B×[0, t_B] ∪ C×[0, e^{−ε/2} t_C]` and the test rejects on the `C` part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConverseWitness {
    pub datasets: [String; 2],
    /// `B = {θ : q(θ|x) > e^ε q(θ|x′)}`.
    pub violating_set: Vec<String>,
    /// `Q(B|x) − e^ε Q(B|x′)`, which exceeds the requested δ.
    pub violation: f64,
    pub t_b: f64,
    pub t_c: f64,
    pub eps_ch: f64,
    pub delta_ch: f64,
    pub masses: AugmentedMasses,
    /// Type I plus type II error of `ψ = 1{z ∈ C̃}` conditioned on `Ã`.
    pub error_sum: f64,
    /// `min(Q̃(Ã|x), Q̃(Ã|x′))`.
    pub conditioning_mass: f64,
    pub note: String,
}

impl ConverseWitness {
    fn verifies(&self) -> bool {
        self.error_sum < 1.0 - self.eps_ch && self.conditioning_mass >= self.delta_ch
    }
}

fn build_witness(
    q: &DiscreteChannel,
    x: usize,
    y: usize,
    eps: f64,
    violation: f64,
    mask: u64,
) -> ConverseWitness {
    let (p, r) = (q.row(x), q.row(y));
    let (mut pb, mut pc, mut rb, mut rc) = (0.0, 0.0, 0.0, 0.0);
    for j in 0..p.len() {
        if mask >> j & 1 == 1 {
            pb += p[j];
            rb += r[j];
        } else {
            pc += p[j];
            rc += r[j];
        }
    }
    let t_b = (rc / pb).min(1.0);
    let t_c = (pb / rc).min(1.0);
    let shrink = (-eps / 2.0).exp();
    let masses = AugmentedMasses {
        b_given_x: t_b * pb,
        c_given_x: shrink * t_c * pc,
        b_given_x_prime: t_b * rb,
        c_given_x_prime: shrink * t_c * rc,
    };
    let a_x = masses.b_given_x + masses.c_given_x;
    let a_y = masses.b_given_x_prime + masses.c_given_x_prime;
    let error_sum = masses.c_given_x / a_x + masses.b_given_x_prime / a_y;
    ConverseWitness {
        datasets: [q.key(x), q.key(y)],
        violating_set: outputs_of_mask(q, mask),
        violation,
        t_b,
        t_c,
        eps_ch: (eps / 4.0).tanh(),
        delta_ch: 0.0,
        masses,
        error_sum,
        conditioning_mass: a_x.min(a_y),
        note: "checks Q and its uniform augmentation only; other less informative channels are not enumerated"
            .to_string(),
    }
}

/// If `q` is not `(eps, delta)`-DP, returns a witness that the uniform
/// augmentation of `q` violates CHTP at
/// `((e^{ε/2} − 1)/(e^{ε/2} + 1), δ e^{−ε/2})`; otherwise `None`.
///
/// Violating pairs are tried in decreasing order of violation and the first
/// witness that passes direct re-evaluation is returned. A violation for which
/// no witness verifies is reported as a numerical failure.
pub fn chtp_converse_witness(
    q: &DiscreteChannel,
    eps: f64,
    delta: f64,
) -> Result<Option<ConverseWitness>> {
    if !(eps >= 0.0 && eps.is_finite() && delta >= 0.0) {
        return Err(Error::spec(format!(
            "need finite eps ≥ 0 and delta ≥ 0, got ({eps}, {delta})"
        )));
    }
    let mut violations = Vec::new();
    for pair in q.neighbor_pairs() {
        for (x, y) in [(pair.a, pair.b), (pair.b, pair.a)] {
            let (h, mask) = hockey_stick(q.row(x), q.row(y), eps);
            if h > delta + VERDICT_SLACK {
                violations.push((h, x, y, mask));
            }
        }
    }
    if violations.is_empty() {
        return Ok(None);
    }
    violations.sort_by(|a, b| b.0.total_cmp(&a.0));
    let delta_ch = delta * (-eps / 2.0).exp();
    for &(h, x, y, mask) in &violations {
        let mut w = build_witness(q, x, y, eps, h, mask);
        w.delta_ch = delta_ch;
        if w.verifies() {
            return Ok(Some(w));
        }
    }
    Err(Error::Numerical(format!(
        "{} approximate-DP violations found but no augmented witness re-verified",
        violations.len()
    )))
}
