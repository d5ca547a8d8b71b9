use serde::Serialize;

use crate::{Error, Result};

/// A closed-form bound together with any regime flags raised while
/// evaluating it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundEvaluation {
    pub value: f64,
    /// Rate-level form with constants dropped, where one is defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && !v.is_nan() {
        Ok(())
    } else {
        Err(Error::spec(format!("{name} must be positive, got {v}")))
    }
}

/// `2 − 2/k`, equal to 2 at `k = ∞`.
fn moment_exponent(k: f64) -> f64 {
    2.0 - 2.0 / k
}

/// `(k − 1)/k`, equal to 1 at `k = ∞`.
fn rate_exponent(k: f64) -> f64 {
    if k.is_infinite() {
        1.0
    } else {
        (k - 1.0) / k
    }
}

/// Two-point risk bound at mass `δ`:
/// `r² δ^{2−2/k} · ½ · max(0, 1 − 2nεδ)`.
pub fn two_point_risk_bound(r: f64, k: f64, n: usize, eps: f64, delta: f64) -> f64 {
    let separation_sq = r * r * delta.powf(moment_exponent(k));
    0.5 * separation_sq * (1.0 - 2.0 * n as f64 * eps * delta).max(0.0)
}

/// Lower bound on the ε-TV-private minimax squared error for means of
/// distributions with `E|X|^k ≤ r^k`, at the mass `δ* = 1/(4nε)`:
/// `r²/(4·4^{2−2/k}) · (1/(nε))^{(2k−2)/k}`.
///
/// When `δ* > 1` the mass is clamped to 1 and the general two-point bound is
/// returned with a flag.
pub fn tv_mean_lower_bound(r: f64, k: f64, n: usize, eps: f64) -> Result<BoundEvaluation> {
    positive("r", r)?;
    positive("eps", eps)?;
    if !(k >= 2.0) {
        return Err(Error::spec(format!("k must be at least 2, got {k}")));
    }
    if n == 0 {
        return Err(Error::spec("n must be positive"));
    }
    let ne = n as f64 * eps;
    let delta = 1.0 / (4.0 * ne);
    let e = moment_exponent(k);
    let asymptotic = Some(r * r * (1.0 / (ne * ne)).powf(rate_exponent(k)).min(1.0));
    if delta > 1.0 {
        return Ok(BoundEvaluation {
            value: two_point_risk_bound(r, k, n, eps, 1.0),
            asymptotic,
            flags: vec![format!("δ* = 1/(4nε) = {delta} exceeds 1; clamped to 1")],
        });
    }
    Ok(BoundEvaluation {
        value: r * r / (4.0 * 4f64.powf(e)) * (1.0 / ne).powf(e),
        asymptotic,
        flags: Vec::new(),
    })
}

/// Support-estimation lower bound `t/(32nε)`.
pub fn uniform_support_lower_bound(t: f64, n: usize, eps: f64) -> Result<f64> {
    positive("t", t)?;
    positive("eps", eps)?;
    if n == 0 {
        return Err(Error::spec("n must be positive"));
    }
    Ok(t / (32.0 * n as f64 * eps))
}

/// `(1 − e^{−εc})/(1 − e^{−ε})`, with its limit `c` at `ε = 0`.
pub(crate) fn group_geometric(eps: f64, c: u64) -> f64 {
    if eps == 0.0 {
        c as f64
    } else {
        (-eps * c as f64).exp_m1() / (-eps).exp_m1()
    }
}

/// Average error-probability lower bound over an `m`-point packing for
/// (ε, δ)-DP estimators, with `np_ceil = ⌈np⌉`:
/// `(m−1)(½e^{−εc} − δ·geom)/(1 + (m−1)e^{−εc})`.
///
/// The value is returned as is; it may be negative (vacuous) for large δ.
pub fn packing_lower_bound(m: usize, np_ceil: u64, eps: f64, delta: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::spec(format!(
            "packing needs at least 2 points, got {m}"
        )));
    }
    if !(eps >= 0.0 && delta >= 0.0) {
        return Err(Error::spec("eps and delta must be nonnegative"));
    }
    if eps == 0.0 && delta > 0.0 {
        return Err(Error::spec(
            "eps = 0 with delta > 0 is outside the bound's range",
        ));
    }
    let a = (-eps * np_ceil as f64).exp();
    let others = (m - 1) as f64;
    Ok(others * (0.5 * a - delta * group_geometric(eps, np_ceil)) / (1.0 + others * a))
}

/// Mixture weight `p = (1/(nε)) min{d/2 − ε, log((1 − e^{−ε})/(4δe^ε))}`,
/// clamped to `[0, 1]`, and the flags raised on the way.
pub fn define_p(d: usize, n: usize, eps: f64, delta: f64) -> Result<(f64, Vec<String>)> {
    positive("eps", eps)?;
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::spec(format!(
            "delta must lie in [0, 1), got {delta}"
        )));
    }
    if n == 0 || d == 0 {
        return Err(Error::spec("n and d must be positive"));
    }
    let mut flags = Vec::new();
    let d_term = d as f64 / 2.0 - eps;
    let log_term = if delta == 0.0 {
        f64::INFINITY
    } else {
        (-(-eps).exp_m1() / (4.0 * delta * eps.exp())).ln()
    };
    let inner = if log_term <= 0.0 {
        flags.push(format!(
            "log term {log_term} is nonpositive (δ too large); using the d-term only"
        ));
        d_term
    } else {
        d_term.min(log_term)
    };
    let mut p = inner / (n as f64 * eps);
    if p < 0.0 {
        flags.push(format!("p = {p} is negative (ε > d/2); clamped to 0"));
        p = 0.0;
    } else if p > 1.0 {
        flags.push(format!("p = {p} exceeds 1; clamped to 1"));
        p = 1.0;
    }
    Ok((p, flags))
}

/// Lower bound on the (ε, δ)-DP minimax squared error for `d`-dimensional
/// means, `(r²/32) p^{2−2/k}`, together with the rate
/// `r² min{((d² ∧ log²(1/δ))/(n²ε²))^{(k−1)/k}, 1}`.
///
/// `d = 1` is routed to [`tv_mean_lower_bound`].
pub fn dp_mean_lower_bound(
    r: f64,
    k: f64,
    d: usize,
    n: usize,
    eps: f64,
    delta: f64,
) -> Result<BoundEvaluation> {
    positive("r", r)?;
    if !(k > 1.0) {
        return Err(Error::spec(format!("k must exceed 1, got {k}")));
    }
    let (p, flags) = define_p(d.max(1), n, eps, delta)?;
    let ne = n as f64 * eps;
    let log_sq = if delta == 0.0 {
        f64::INFINITY
    } else {
        (1.0 / delta).ln().powi(2)
    };
    let rate = ((d as f64).powi(2).min(log_sq) / (ne * ne))
        .powf(rate_exponent(k))
        .min(1.0);
    if d == 1 {
        let mut tv = tv_mean_lower_bound(r, k, n, eps)?;
        tv.asymptotic = Some(r * r * rate);
        return Ok(tv);
    }
    Ok(BoundEvaluation {
        value: r * r / 32.0 * p.powf(moment_exponent(k)),
        asymptotic: Some(r * r * rate),
        flags,
    })
}

/// `n^{−2/(2+d)} + (nε)^{−2/(1+d)}`: the density-estimation lower rate without
/// its dimension constant.
pub fn density_lower_rate(d: usize, n: usize, eps: f64) -> Result<f64> {
    positive("eps", eps)?;
    if n == 0 || d == 0 {
        return Err(Error::spec("n and d must be positive"));
    }
    let (d, n) = (d as f64, n as f64);
    Ok(n.powf(-2.0 / (2.0 + d)) + (n * eps).powf(-2.0 / (1.0 + d)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_bound_example_and_limit() {
        let v = tv_mean_lower_bound(1.0, 2.0, 100, 0.1).unwrap();
        assert!((v.value - 0.00625).abs() < 1e-15);
        assert!(v.flags.is_empty());
        let inf = tv_mean_lower_bound(1.0, f64::INFINITY, 100, 0.1)
            .unwrap()
            .value;
        assert!((inf - 0.01f64 / 64.0).abs() < 1e-18);
        let scaled = tv_mean_lower_bound(3.0, 4.0, 50, 0.2).unwrap().value;
        assert!(
            (scaled - 9.0 * tv_mean_lower_bound(1.0, 4.0, 50, 0.2).unwrap().value).abs() < 1e-15
        );
    }

    #[test]
    fn tv_bound_agrees_with_two_point_form() {
        for (n, eps, k) in [(100, 0.1, 2.0), (10, 1.0, 3.0), (1000, 0.05, 8.0)] {
            let delta = 1.0 / (4.0 * n as f64 * eps);
            let a = tv_mean_lower_bound(1.7, k, n, eps).unwrap().value;
            let b = two_point_risk_bound(1.7, k, n, eps, delta);
            assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn tv_bound_clamps() {
        let v = tv_mean_lower_bound(1.0, 2.0, 1, 0.1).unwrap();
        assert_eq!(v.flags.len(), 1);
        assert!((v.value - 0.4).abs() < 1e-15);
        assert!(tv_mean_lower_bound(1.0, 1.5, 10, 0.1).is_err());
    }

    #[test]
    fn support_bound() {
        assert!((uniform_support_lower_bound(1.0, 100, 0.1).unwrap() - 0.003125).abs() < 1e-15);
        assert!((uniform_support_lower_bound(3.0, 100, 0.1).unwrap() - 0.009375).abs() < 1e-15);
    }

    #[test]
    fn packing_examples() {
        assert!((packing_lower_bound(2, 0, 0.7, 0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((packing_lower_bound(1 << 20, 0, 0.0, 0.0).unwrap() - 0.5).abs() < 1e-6);
        assert!(packing_lower_bound(2, 1, 0.0, 0.1).is_err());
        assert!(packing_lower_bound(1, 1, 1.0, 0.0).is_err());
        let (m, c, eps, delta) = (16.0f64, 2.0, 1.0f64, 1e-6);
        let a = (-eps * c).exp();
        let geom = (1.0 - a) / (1.0 - (-eps).exp());
        let oracle = (m - 1.0) * (0.5 * a - delta * geom) / (1.0 + (m - 1.0) * a);
        assert!((packing_lower_bound(16, 2, eps, delta).unwrap() - oracle).abs() < 1e-14);
    }

    #[test]
    fn define_p_regimes() {
        let (p, flags) = define_p(4, 100, 0.5, 0.0).unwrap();
        assert!((p - 1.5 / 50.0).abs() < 1e-15 && flags.is_empty());
        let (p, flags) = define_p(2, 100, 2.0, 0.0).unwrap();
        assert_eq!(p, 0.0);
        assert_eq!(flags.len(), 1);
        let (p, flags) = define_p(50, 100, 0.5, 0.4).unwrap();
        assert!((p - 24.5 / 50.0).abs() < 1e-15);
        assert_eq!(flags.len(), 1);
        // log term active for small d-term budgets
        let (p, _) = define_p(400, 100, 1.0, 1e-3).unwrap();
        let log_term = ((1.0 - (-1.0f64).exp()) / (4e-3 * 1f64.exp())).ln();
        assert!((p - log_term / 100.0).abs() < 1e-15);
    }

    #[test]
    fn dp_mean_bound_forms() {
        let v = dp_mean_lower_bound(1.0, f64::INFINITY, 4, 100, 0.5, 0.0).unwrap();
        let p = (2.0 - 0.5) / 50.0;
        assert!((v.value - p * p / 32.0).abs() < 1e-15);
        assert!((v.asymptotic.unwrap() - 16.0 / 2500.0).abs() < 1e-15);
        let scaled = dp_mean_lower_bound(2.0, 3.0, 4, 100, 0.5, 1e-9)
            .unwrap()
            .value;
        assert!(
            (scaled
                - 4.0
                    * dp_mean_lower_bound(1.0, 3.0, 4, 100, 0.5, 1e-9)
                        .unwrap()
                        .value)
                .abs()
                < 1e-15
        );
        let d1 = dp_mean_lower_bound(1.0, 2.0, 1, 100, 0.1, 0.0).unwrap();
        assert!((d1.value - 0.00625).abs() < 1e-15);
    }

    #[test]
    fn density_rate() {
        let v = density_lower_rate(1, 10_000, 1.0).unwrap();
        assert!((v - (10f64.powf(-8.0 / 3.0) + 1e-4)).abs() < 1e-15);
        let stat = density_lower_rate(1, 10_000, 1e300).unwrap();
        assert!((stat - 10f64.powf(-8.0 / 3.0)).abs() < 1e-15);
        assert!(
            density_lower_rate(2, 1000, 1.0).unwrap() > density_lower_rate(2, 2000, 1.0).unwrap()
        );
    }
}
