use std::io::Write;

use serde::Serialize;

use super::sweep::RiskCurve;
use crate::Result;

pub const CSV_COLUMNS: [&str; 14] = [
    "mechanism",
    "variant",
    "family",
    "d",
    "k_moments",
    "r",
    "eps",
    "delta",
    "n",
    "k_bins",
    "reps",
    "risk_mean",
    "risk_stderr",
    "seed",
];

#[derive(Serialize)]
struct Row<'a> {
    mechanism: &'a str,
    variant: &'a str,
    family: &'a str,
    d: usize,
    k_moments: Option<f64>,
    r: Option<f64>,
    eps: f64,
    delta: Option<f64>,
    n: usize,
    k_bins: Option<usize>,
    reps: usize,
    risk_mean: f64,
    risk_stderr: f64,
    seed: u64,
}

/// One CSV row per grid point of every curve, header included.
pub fn write_csv<W: Write>(curves: &[RiskCurve], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for curve in curves {
        for p in &curve.points {
            w.serialize(Row {
                mechanism: &curve.mechanism,
                variant: &curve.variant,
                family: &curve.family,
                d: p.d,
                k_moments: curve.k_moments,
                r: curve.r,
                eps: p.eps,
                delta: curve.delta,
                n: p.n,
                k_bins: p.k_bins,
                reps: p.reps,
                risk_mean: p.risk_mean,
                risk_stderr: p.risk_stderr,
                seed: curve.seed,
            })?;
        }
    }
    if curves.iter().all(|c| c.points.is_empty()) {
        w.write_record(CSV_COLUMNS)?;
    }
    w.flush()?;
    Ok(())
}
