use serde::Serialize;

use super::evaluators::two_point_risk_bound;
use super::packing::PackingSet;
use crate::audit::audit_f_privacy;
use crate::prob::{
    channel_marginal, dataset_distribution, le_cam_error, DiscreteChannel, FDivergenceSpec,
    FiniteDistribution,
};
use crate::{Error, Result, VERDICT_SLACK};

/// Labels of the three support points `−a, 0, +a`.
pub const TWO_POINT_LABELS: [&str; 3] = ["neg", "zero", "pos"];

/// Two distributions on `{−a, 0, a}` with `a = r δ^{−1/k}`: `P₀` puts mass δ
/// on `−a`, `P₁` puts mass δ on `+a`, the rest sits at 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPointConstruction {
    pub r: f64,
    #[serde(with = "crate::extended")]
    pub k: f64,
    pub delta_mass: f64,
    /// `a = r δ^{−1/k}`.
    pub atom: f64,
    pub p0: FiniteDistribution,
    pub p1: FiniteDistribution,
    pub theta0: f64,
    pub theta1: f64,
}

impl TwoPointConstruction {
    /// Support points in label order.
    pub fn support(&self) -> [f64; 3] {
        [-self.atom, 0.0, self.atom]
    }

    /// `E|X|^k` under `p0` (identical under `p1`).
    pub fn kth_moment(&self) -> f64 {
        self.p0
            .probs()
            .iter()
            .zip(self.support())
            .map(|(w, x)| w * x.abs().powf(self.k))
            .sum()
    }

    pub fn labels() -> Vec<String> {
        TWO_POINT_LABELS.iter().map(|s| s.to_string()).collect()
    }
}

pub fn two_point_mean_construction(
    r: f64,
    k: f64,
    delta_mass: f64,
) -> Result<TwoPointConstruction> {
    if !(r > 0.0) || !(k > 1.0) {
        return Err(Error::spec(format!(
            "need r > 0 and k > 1, got r = {r}, k = {k}"
        )));
    }
    if !(delta_mass > 0.0 && delta_mass <= 1.0) {
        return Err(Error::spec(format!(
            "delta_mass must lie in (0, 1], got {delta_mass}"
        )));
    }
    let atom = r * delta_mass.powf(-1.0 / k);
    let mean = r * delta_mass.powf(1.0 - 1.0 / k);
    let rest = 1.0 - delta_mass;
    Ok(TwoPointConstruction {
        r,
        k,
        delta_mass,
        atom,
        p0: FiniteDistribution::new(TwoPointConstruction::labels(), vec![delta_mass, rest, 0.0])?,
        p1: FiniteDistribution::new(TwoPointConstruction::labels(), vec![0.0, rest, delta_mass])?,
        theta0: -mean,
        theta1: mean,
    })
}

/// Both sides of the estimation-to-testing reduction for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainReport {
    pub eps_tv: f64,
    /// Exact Bayes risk (uniform prior on `{θ₀, θ₁}`, squared error).
    pub bayes_risk: f64,
    /// `((θ₁ − θ₀)/2)² · (1 − TV(M₀, M₁))`.
    pub reduction: f64,
    /// Two-point closed form at the channel's TV level.
    pub closed_form: f64,
}

impl ChainReport {
    pub fn holds(&self) -> bool {
        self.bayes_risk >= self.reduction - VERDICT_SLACK
            && self.reduction >= self.closed_form - VERDICT_SLACK
    }
}

/// Evaluates `Bayes risk ≥ Φ(δ)·le_cam_error(M₀, M₁) ≥ closed form` for a
/// channel on the construction's support.
pub fn estimation_testing_chain(
    q: &DiscreteChannel,
    c: &TwoPointConstruction,
) -> Result<ChainReport> {
    if q.input_alphabet() != TwoPointConstruction::labels().as_slice() {
        return Err(Error::domain(format!(
            "channel alphabet must be {TWO_POINT_LABELS:?}"
        )));
    }
    let eps_tv = audit_f_privacy(q, &FDivergenceSpec::TotalVariation, 1.0)?.tight_param;
    let n = q.n();
    let m0 = channel_marginal(q, &dataset_distribution(q, &vec![c.p0.clone(); n])?)?;
    let m1 = channel_marginal(q, &dataset_distribution(q, &vec![c.p1.clone(); n])?)?;
    let gap = c.theta1 - c.theta0;
    let overlap: f64 = m0
        .probs()
        .iter()
        .zip(m1.probs())
        .filter(|(a, b)| **a + **b > 0.0)
        .map(|(a, b)| a * b / (a + b))
        .sum();
    Ok(ChainReport {
        eps_tv,
        bayes_risk: 0.5 * gap * gap * overlap,
        reduction: (gap / 2.0).powi(2) * le_cam_error(&m0, &m1)?,
        closed_form: two_point_risk_bound(c.r, c.k, n, eps_tv, c.delta_mass),
    })
}

/// `P_v = (1 − p)δ₀ + p δ_{x_v}` with `x_v = p^{−1/k} r v` over a packing `V`;
/// the means are `θ_v = p^{1−1/k} r v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureConstruction {
    pub r: f64,
    #[serde(with = "crate::extended")]
    pub k: f64,
    pub p: f64,
    pub atoms: Vec<Vec<f64>>,
    pub thetas: Vec<Vec<f64>>,
    /// `min_{v ≠ v′} ‖θ_v − θ_v′‖₂`.
    pub separation: f64,
}

impl MixtureConstruction {
    pub fn new(r: f64, k: f64, p: f64, packing: &PackingSet) -> Result<Self> {
        if !(r > 0.0) || !(k > 1.0) {
            return Err(Error::spec(format!(
                "need r > 0 and k > 1, got r = {r}, k = {k}"
            )));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::spec(format!(
                "mixture weight must lie in (0, 1], got {p}"
            )));
        }
        let (atom_scale, theta_scale) = (r * p.powf(-1.0 / k), r * p.powf(1.0 - 1.0 / k));
        let scale = |s: f64| -> Vec<Vec<f64>> {
            packing
                .points
                .iter()
                .map(|v| v.iter().map(|x| s * x).collect())
                .collect()
        };
        Ok(MixtureConstruction {
            r,
            k,
            p,
            atoms: scale(atom_scale),
            thetas: scale(theta_scale),
            separation: theta_scale * packing.separation,
        })
    }

    /// `E‖X‖^k` under the mixture indexed by `v`.
    pub fn kth_moment(&self, v: usize) -> f64 {
        let norm = self.atoms[v].iter().map(|x| x * x).sum::<f64>().sqrt();
        self.p * norm.powf(self.k)
    }
}
