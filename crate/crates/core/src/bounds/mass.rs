use rand::Rng;

use super::evaluators::group_geometric;
use crate::audit::{audit_approx_dp, audit_dp, CHTP_OUTPUT_LIMIT};
use crate::prob::{channel_marginal, dataset_distribution, DiscreteChannel, FiniteDistribution};
use crate::{Error, Result};

/// A channel on a finite alphabet with mixtures `P_v = (1 − p)δ_base + p δ_{components[v]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassEverywhereInstance {
    pub q: DiscreteChannel,
    pub base: usize,
    pub components: Vec<usize>,
    pub p: f64,
    pub eps: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassEverywhereCheck {
    pub np_ceil: u64,
    pub subsets_checked: usize,
    /// Smallest `M_v(A) − [e^{−εc}(M_v′(A) − ½) − δ·geom(c)]` seen.
    pub min_margin: f64,
}

impl MassEverywhereCheck {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.min_margin >= -tolerance
    }
}

fn ceil_np(n: usize, p: f64) -> u64 {
    let np = n as f64 * p;
    let rounded = np.round();
    if (np - rounded).abs() < 1e-9 {
        rounded as u64
    } else {
        np.ceil() as u64
    }
}

/// Checks, for every ordered pair `v ≠ v′` and every output set `A`,
/// `M_v(A) ≥ e^{−εc}(M_v′(A) − ½) − δ(1 − e^{−εc})/(1 − e^{−ε})` with
/// `c = ⌈np⌉` and `M_v` the output law under `P_vⁿ`.
pub fn verify_mass_everywhere(inst: &MassEverywhereInstance) -> Result<MassEverywhereCheck> {
    let q = &inst.q;
    let k = q.input_alphabet().len();
    let m = q.output_set().len();
    if m > CHTP_OUTPUT_LIMIT {
        return Err(Error::resource(format!(
            "|Θ| = {m} is too large for subset enumeration"
        )));
    }
    if inst.base >= k || inst.components.iter().any(|&c| c >= k) || inst.components.len() < 2 {
        return Err(Error::domain(
            "base and at least two components must index the alphabet",
        ));
    }
    if !(0.0..=1.0).contains(&inst.p) {
        return Err(Error::spec("mixture weight must lie in [0, 1]"));
    }
    if !audit_approx_dp(q, inst.eps, inst.delta)?.holds {
        return Err(Error::spec(
            "channel is not (eps, delta)-DP at the stated parameters",
        ));
    }
    let n = q.n();
    let marginals = inst
        .components
        .iter()
        .map(|&c| {
            let mut probs = vec![0.0; k];
            probs[inst.base] += 1.0 - inst.p;
            probs[c] += inst.p;
            let pv = FiniteDistribution::new(q.input_alphabet().to_vec(), probs)?;
            channel_marginal(q, &dataset_distribution(q, &vec![pv; n])?)
        })
        .collect::<Result<Vec<_>>>()?;
    let c = ceil_np(n, inst.p);
    let shrink = (-inst.eps * c as f64).exp();
    let slack = inst.delta * group_geometric(inst.eps, c);
    let mut min_margin = f64::INFINITY;
    let mut subsets_checked = 0;
    for (i, mv) in marginals.iter().enumerate() {
        for (j, mw) in marginals.iter().enumerate() {
            if i == j {
                continue;
            }
            for mask in 0u64..1 << m {
                let rhs = shrink * (mw.mass_of_mask(mask) - 0.5) - slack;
                min_margin = min_margin.min(mv.mass_of_mask(mask) - rhs);
                subsets_checked += 1;
            }
        }
    }
    Ok(MassEverywhereCheck {
        np_ceil: c,
        subsets_checked,
        min_margin,
    })
}

/// A random ε-DP channel (entries `∝ exp(s)` with `s ∈ [0, ε₀/2]`) on an
/// alphabet of `components + 1` symbols, audited for its tight ε, with a
/// random mixture weight and δ.
pub fn random_mass_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    components: usize,
    outputs: usize,
) -> Result<MassEverywhereInstance> {
    let alphabet: Vec<String> = (0..=components).map(|i| format!("x{i}")).collect();
    let out: Vec<String> = (0..outputs).map(|i| format!("t{i}")).collect();
    let eps0: f64 = rng.random_range(0.05..1.5);
    let q = DiscreteChannel::from_fn(alphabet, n, out, |_| {
        let w: Vec<f64> = (0..outputs)
            .map(|_| f64::exp(rng.random_range(0.0..eps0 / 2.0)))
            .collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|v| v / s).collect()
    })?;
    let eps = audit_dp(&q, 0.0)?.tight_param;
    Ok(MassEverywhereInstance {
        q,
        base: 0,
        components: (1..=components).collect(),
        p: rng.random_range(0.0..1.0),
        eps,
        delta: rng.random_range(0.0..0.05),
    })
}
