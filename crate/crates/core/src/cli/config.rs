use rand::Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bench::{
    risk_sweep, table1_report, write_csv, RiskCurve, Sweep, Table1Config, Table1Report,
};
use crate::bounds::{
    chain_sweep, contraction_sweep, density_lower_rate, dp_mean_lower_bound, greedy_packing,
    mass_everywhere_sweep, packing_lower_bound, tv_mean_lower_bound, uniform_support_lower_bound,
    BoundEvaluation, ChainSweepConfig, ContractionSweepConfig, MassSweepConfig, VerificationReport,
};
use crate::rng::RngStream;
use crate::{Error, Result};

/// Parses a config document whose `command` field must equal `command`.
/// Unknown fields anywhere in the document are rejected.
pub fn load_config<T: DeserializeOwned>(text: &str, command: &str) -> Result<T> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Spec("config must be a JSON object".into()))?;
    match obj.remove("command") {
        Some(serde_json::Value::String(c)) if c == command => {}
        Some(other) => {
            return Err(Error::Spec(format!(
                "config is for command {other}, expected \"{command}\""
            )))
        }
        None => {
            return Err(Error::Spec(format!(
                "config lacks \"command\": \"{command}\""
            )))
        }
    }
    Ok(serde_json::from_value(value)?)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub sweeps: Vec<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table1: Option<Table1Config>,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sweeps.is_empty() && self.table1.is_none() {
            return Err(Error::Spec(
                "bench config needs `sweeps` or `table1`".into(),
            ));
        }
        for s in &self.sweeps {
            s.validate()?;
        }
        if let Some(t) = &self.table1 {
            t.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub seed: u64,
    pub curves: Vec<RiskCurve>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table1: Option<Table1Report>,
}

/// Runs every sweep and the rate-table report. Returns the CSV text (all
/// curves, table curves last) and the JSON report.
///
/// Every sweep reuses the master seed, so curves share common random numbers.
pub fn run_bench(cfg: &BenchConfig, seed: u64) -> Result<(String, BenchReport)> {
    cfg.validate()?;
    let curves = cfg
        .sweeps
        .iter()
        .map(|s| risk_sweep(s, seed))
        .collect::<Result<Vec<_>>>()?;
    let table1 = cfg
        .table1
        .as_ref()
        .map(|t| table1_report(t, seed))
        .transpose()?;
    let mut all = curves.clone();
    if let Some(t) = &table1 {
        all.extend(t.curves.iter().cloned());
        all.extend(t.ratio_curves.iter().cloned());
    }
    let mut buf = Vec::new();
    write_csv(&all, &mut buf)?;
    let csv = String::from_utf8(buf).map_err(|e| Error::Spec(e.to_string()))?;
    Ok((
        csv,
        BenchReport {
            seed,
            curves,
            table1,
        },
    ))
}

/// A closed-form evaluation to tabulate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "bound", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EvaluatorRequest {
    TvMean {
        r: f64,
        #[serde(with = "crate::extended")]
        k: f64,
        n: usize,
        eps: f64,
    },
    UniformSupport {
        t: f64,
        n: usize,
        eps: f64,
    },
    Packing {
        m: usize,
        np_ceil: u64,
        eps: f64,
        delta: f64,
    },
    DpMean {
        r: f64,
        #[serde(with = "crate::extended")]
        k: f64,
        d: usize,
        n: usize,
        eps: f64,
        delta: f64,
    },
    /// Builds a greedy packing of the unit sphere in `d` dimensions and
    /// evaluates the packing bound at `⌈np⌉` with the given mixture weight.
    SpherePacking {
        d: usize,
        n: usize,
        p: f64,
        eps: f64,
        delta: f64,
    },
    DensityRate {
        d: usize,
        n: usize,
        eps: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluatorRow {
    pub request: EvaluatorRequest,
    #[serde(flatten)]
    pub result: BoundEvaluation,
}

fn default_evaluators() -> Vec<EvaluatorRequest> {
    use EvaluatorRequest::*;
    vec![
        TvMean {
            r: 1.0,
            k: 2.0,
            n: 100,
            eps: 0.1,
        },
        TvMean {
            r: 1.0,
            k: f64::INFINITY,
            n: 100,
            eps: 0.1,
        },
        UniformSupport {
            t: 1.0,
            n: 100,
            eps: 0.1,
        },
        Packing {
            m: 2,
            np_ceil: 0,
            eps: 1.0,
            delta: 0.0,
        },
        DpMean {
            r: 1.0,
            k: f64::INFINITY,
            d: 8,
            n: 1000,
            eps: 1.0,
            delta: 1e-6,
        },
        SpherePacking {
            d: 3,
            n: 100,
            p: 0.01,
            eps: 1.0,
            delta: 1e-6,
        },
        DensityRate {
            d: 1,
            n: 10_000,
            eps: 1.0,
        },
    ]
}

fn evaluate(req: &EvaluatorRequest, seed: u64, index: usize) -> Result<BoundEvaluation> {
    let plain = |value: f64| BoundEvaluation {
        value,
        asymptotic: None,
        flags: Vec::new(),
    };
    match *req {
        EvaluatorRequest::TvMean { r, k, n, eps } => tv_mean_lower_bound(r, k, n, eps),
        EvaluatorRequest::UniformSupport { t, n, eps } => {
            uniform_support_lower_bound(t, n, eps).map(plain)
        }
        EvaluatorRequest::Packing {
            m,
            np_ceil,
            eps,
            delta,
        } => packing_lower_bound(m, np_ceil, eps, delta).map(plain),
        EvaluatorRequest::DpMean {
            r,
            k,
            d,
            n,
            eps,
            delta,
        } => dp_mean_lower_bound(r, k, d, n, eps, delta),
        EvaluatorRequest::SpherePacking {
            d,
            n,
            p,
            eps,
            delta,
        } => {
            if !(0.0..=1.0).contains(&p) || d == 0 {
                return Err(Error::Spec(
                    "sphere packing needs d ≥ 1 and p in [0, 1]".into(),
                ));
            }
            let mut rng = RngStream::new(seed, index as u64).rng();
            let packing = greedy_packing(d, &mut rng);
            let np = n as f64 * p;
            let np_ceil = if (np - np.round()).abs() < 1e-9 {
                np.round()
            } else {
                np.ceil()
            } as u64;
            let value = packing_lower_bound(packing.points.len(), np_ceil, eps, delta)?;
            let mut e = plain(value);
            e.flags
                .push(format!("packing size {}", packing.points.len()));
            Ok(e)
        }
        EvaluatorRequest::DensityRate { d, n, eps } => density_lower_rate(d, n, eps).map(plain),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    #[serde(default)]
    pub contraction: ContractionSweepConfig,
    #[serde(default)]
    pub mass_everywhere: MassSweepConfig,
    #[serde(default)]
    pub chain: ChainSweepConfig,
    #[serde(default = "default_evaluators")]
    pub evaluators: Vec<EvaluatorRequest>,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig {
            contraction: ContractionSweepConfig::default(),
            mass_everywhere: MassSweepConfig::default(),
            chain: ChainSweepConfig::default(),
            evaluators: default_evaluators(),
        }
    }
}

impl BoundsConfig {
    pub fn validate(&self) -> Result<()> {
        let c = &self.contraction;
        if c.alphabet < 2 || c.max_n == 0 || c.outputs < 2 {
            return Err(Error::Spec(
                "contraction sweep needs alphabet ≥ 2, max_n ≥ 1, outputs ≥ 2".into(),
            ));
        }
        let m = &self.mass_everywhere;
        if m.n == 0 || m.components == 0 || m.outputs == 0 || m.outputs > 20 {
            return Err(Error::Spec(
                "mass sweep needs n, components ≥ 1 and 1 ≤ outputs ≤ 20".into(),
            ));
        }
        if !(self.chain.k >= 2.0) || self.chain.max_n == 0 {
            return Err(Error::Spec("chain sweep needs k ≥ 2 and max_n ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub seed: u64,
    pub contraction: VerificationReport,
    pub mass_everywhere: VerificationReport,
    pub estimation_testing_chain: VerificationReport,
    pub evaluators: Vec<EvaluatorRow>,
}

impl BoundsReport {
    pub fn verifications(&self) -> [&VerificationReport; 3] {
        [
            &self.contraction,
            &self.mass_everywhere,
            &self.estimation_testing_chain,
        ]
    }

    pub fn passed(&self) -> bool {
        self.verifications().iter().all(|r| r.passed())
    }
}

/// Runs the three verification sweeps (in parallel, each on its own seed
/// derived from `seed`) and the evaluator table.
pub fn run_bounds(cfg: &BoundsConfig, seed: u64) -> Result<BoundsReport> {
    cfg.validate()?;
    let mut seeds = RngStream::new(seed, u64::MAX).rng();
    let (s1, s2, s3): (u64, u64, u64) = (seeds.random(), seeds.random(), seeds.random());
    let (contraction, (mass, chain)) = rayon::join(
        || contraction_sweep(&cfg.contraction, s1),
        || {
            rayon::join(
                || mass_everywhere_sweep(&cfg.mass_everywhere, s2),
                || chain_sweep(&cfg.chain, s3),
            )
        },
    );
    let evaluators = cfg
        .evaluators
        .iter()
        .enumerate()
        .map(|(i, req)| {
            Ok(EvaluatorRow {
                request: req.clone(),
                result: evaluate(req, seed, i)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundsReport {
        seed,
        contraction: contraction?,
        mass_everywhere: mass?,
        estimation_testing_chain: chain?,
        evaluators,
    })
}
