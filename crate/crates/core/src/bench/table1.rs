use serde::{Deserialize, Serialize};

use super::family::DistributionFamilySpec;
use super::fit::fit_exponent;
use super::sweep::{risk_sweep, RiskCurve, Sweep, SweepAxis, SweepMechanism, MIN_REPS};
use crate::mechanisms::{MechanismSpec, MechanismVariant};
use crate::{Error, Result};

fn default_n_values() -> Vec<f64> {
    [1, 2, 3, 4, 5, 6, 12, 13, 14, 15]
        .iter()
        .map(|e| 2f64.powi(*e))
        .collect()
}

/// Rates comparison for bounded data (`k = ∞`) on the sphere family.
///
/// Windows are given as `[lo, hi]` values of `n`, both of which must appear in
/// `n_values`. Dimension ratios are measured at `n = ratio_n` between `d` and
/// `d_high`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Table1Config {
    pub r: f64,
    pub eps: f64,
    pub eps_kl: f64,
    pub delta: f64,
    pub d: usize,
    pub d_high: usize,
    pub reps: usize,
    pub n_values: Vec<f64>,
    pub privacy_window: (f64, f64),
    pub statistical_window: (f64, f64),
    pub ratio_n: usize,
    pub slope_tolerance: f64,
    pub ratio_factor: f64,
    pub variants: Vec<MechanismVariant>,
}

impl Default for Table1Config {
    fn default() -> Self {
        Table1Config {
            r: 1.0,
            eps: 0.5,
            eps_kl: 0.5,
            delta: 1e-6,
            d: 4,
            d_high: 16,
            reps: 1000,
            n_values: default_n_values(),
            privacy_window: (8.0, 64.0),
            statistical_window: (4096.0, 32768.0),
            ratio_n: 8,
            slope_tolerance: 0.25,
            ratio_factor: 1.6,
            variants: vec![
                MechanismVariant::SmoothDpLaplace,
                MechanismVariant::KlGaussian,
                MechanismVariant::ApproxDpGaussian,
            ],
        }
    }
}

/// One measured quantity next to its theoretical value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Check {
    pub row: String,
    pub quantity: String,
    pub theory: f64,
    pub measured: f64,
    pub lower: f64,
    pub upper: f64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table1Report {
    pub config: Table1Config,
    pub curves: Vec<RiskCurve>,
    pub ratio_curves: Vec<RiskCurve>,
    pub checks: Vec<Table1Check>,
    pub all_agree: bool,
}

impl Table1Report {
    pub fn check(&self, row: &str, quantity: &str) -> Option<&Table1Check> {
        self.checks
            .iter()
            .find(|c| c.row == row && c.quantity == quantity)
    }
}

fn spec_for(cfg: &Table1Config, variant: MechanismVariant, d: usize) -> MechanismSpec {
    match variant {
        MechanismVariant::SmoothDpLaplace => {
            MechanismSpec::smooth_dp_laplace(cfg.r, d, cfg.ratio_n, cfg.eps)
        }
        MechanismVariant::KlGaussian => MechanismSpec {
            eps: cfg.eps,
            ..MechanismSpec::kl_gaussian(cfg.r, d, cfg.ratio_n, cfg.eps_kl)
        },
        MechanismVariant::ApproxDpGaussian => {
            MechanismSpec::approx_dp_gaussian(cfg.r, d, cfg.ratio_n, cfg.eps, cfg.delta)
        }
    }
}

fn window_indices(values: &[f64], window: (f64, f64)) -> Result<(usize, usize)> {
    let find = |v: f64| {
        values
            .iter()
            .position(|x| *x == v)
            .ok_or_else(|| Error::spec(format!("window endpoint n = {v} is not on the grid")))
    };
    let (lo, hi) = (find(window.0)?, find(window.1)?);
    if hi < lo + 3 {
        return Err(Error::spec(format!(
            "window {window:?} spans fewer than 4 grid points"
        )));
    }
    Ok((lo, hi))
}

fn slope_check(row: &str, quantity: &str, theory: f64, measured: f64, tol: f64) -> Table1Check {
    Table1Check {
        row: row.to_string(),
        quantity: quantity.to_string(),
        theory,
        measured,
        lower: theory - tol,
        upper: theory + tol,
        agrees: (measured - theory).abs() <= tol,
    }
}

impl Table1Config {
    pub fn validate(&self) -> Result<()> {
        if self.d_high <= self.d || self.d == 0 {
            return Err(Error::spec("need 0 < d < d_high"));
        }
        if self.reps < MIN_REPS {
            return Err(Error::spec(format!(
                "reps must be at least {MIN_REPS}, got {}",
                self.reps
            )));
        }
        window_indices(&self.n_values, self.privacy_window)?;
        window_indices(&self.n_values, self.statistical_window)?;
        Ok(())
    }
}

/// Measures log-log slopes in the privacy and statistical windows and the
/// privacy-regime dimension ratio for each configured variant, plus the
/// slope of the non-private estimator.
///
/// Theory (bounded data): smooth DP risk `d²/(n²ε²) + 1/n`, KL and
/// approximate DP risk linear in `d` in the privacy term, all `1/n`
/// statistically. The KL row has no privacy-slope check: with `ε_KL = ε`
/// its privacy term dominates only for `n < d/ε`, below the privacy window.
pub fn table1_report(cfg: &Table1Config, master_seed: u64) -> Result<Table1Report> {
    cfg.validate()?;
    let (privacy, statistical) = (cfg.privacy_window, cfg.statistical_window);
    let family = DistributionFamilySpec::BoundedBall { r: cfg.r, d: cfg.d };
    let mut curves = Vec::new();
    let mut ratio_curves = Vec::new();
    let mut checks = Vec::new();
    let tol = cfg.slope_tolerance;

    let mut rows: Vec<(String, MechanismVariant, bool)> = cfg
        .variants
        .iter()
        .map(|v| (v.as_str().to_string(), *v, false))
        .collect();
    rows.push((
        "non-private".to_string(),
        MechanismVariant::SmoothDpLaplace,
        true,
    ));

    for (row, variant, suppress) in rows {
        let sweep = Sweep {
            name: Some(row.clone()),
            mechanism: SweepMechanism::TruncatedMean(spec_for(cfg, variant, cfg.d)),
            family: family.clone(),
            axis: SweepAxis::N,
            values: cfg.n_values.clone(),
            reps: cfg.reps,
            n: None,
            suppress_noise: suppress,
            fit_window: None,
        };
        let curve = risk_sweep(&sweep, master_seed)?;
        if suppress {
            checks.push(slope_check(
                &row,
                "privacy_window_slope",
                -1.0,
                fit_exponent(&curve, privacy)?,
                tol,
            ));
            checks.push(slope_check(
                &row,
                "statistical_window_slope",
                -1.0,
                fit_exponent(&curve, statistical)?,
                tol,
            ));
            curves.push(curve);
            continue;
        }
        if variant != MechanismVariant::KlGaussian {
            checks.push(slope_check(
                &row,
                "privacy_window_slope",
                -2.0,
                fit_exponent(&curve, privacy)?,
                tol,
            ));
        }
        checks.push(slope_check(
            &row,
            "statistical_window_slope",
            -1.0,
            fit_exponent(&curve, statistical)?,
            tol,
        ));
        curves.push(curve);

        let ratio_sweep = Sweep {
            name: Some(format!("{row} dimension ratio")),
            mechanism: SweepMechanism::TruncatedMean(spec_for(cfg, variant, cfg.d)),
            family: family.clone(),
            axis: SweepAxis::D,
            values: vec![cfg.d as f64, cfg.d_high as f64],
            reps: cfg.reps,
            n: Some(cfg.ratio_n),
            suppress_noise: false,
            fit_window: None,
        };
        let rc = risk_sweep(&ratio_sweep, master_seed)?;
        let measured = rc.points[1].risk_mean / rc.points[0].risk_mean;
        let scale = cfg.d_high as f64 / cfg.d as f64;
        let theory = if variant == MechanismVariant::SmoothDpLaplace {
            scale * scale
        } else {
            scale
        };
        checks.push(Table1Check {
            row: row.clone(),
            quantity: "dimension_ratio".to_string(),
            theory,
            measured,
            lower: theory / cfg.ratio_factor,
            upper: theory * cfg.ratio_factor,
            agrees: measured >= theory / cfg.ratio_factor && measured <= theory * cfg.ratio_factor,
        });
        ratio_curves.push(rc);
    }
    let all_agree = checks.iter().all(|c| c.agrees);
    Ok(Table1Report {
        config: cfg.clone(),
        curves,
        ratio_curves,
        checks,
        all_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_must_be_on_grid() {
        let values = default_n_values();
        assert_eq!(window_indices(&values, (8.0, 64.0)).unwrap(), (2, 5));
        assert!(window_indices(&values, (8.0, 32.0)).is_err());
        assert!(window_indices(&values, (7.0, 64.0)).is_err());
    }

    #[test]
    fn config_defaults_and_overrides() {
        let cfg: Table1Config = serde_json::from_str(r#"{"reps": 200}"#).unwrap();
        assert_eq!(cfg.reps, 200);
        assert_eq!(cfg.d, 4);
        assert!(serde_json::from_str::<Table1Config>(r#"{"repz": 200}"#).is_err());
    }
}
