use super::sweep::RiskCurve;
use crate::{Error, Result};

/// Least-squares slope of `log y` against `log x`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 4 {
        return Err(Error::Fit(format!(
            "need at least 4 points, got {}",
            xs.len().min(ys.len())
        )));
    }
    if let Some((x, y)) = xs.iter().zip(ys).find(|(x, y)| !(**x > 0.0 && **y > 0.0)) {
        return Err(Error::Fit(format!(
            "nonpositive value in fit window: ({x}, {y})"
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit(
            "swept variable is constant over the window".into(),
        ));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Log-log slope of `risk_mean` against the swept variable, over the grid
/// points whose value lies in `[window.0, window.1]`.
pub fn fit_exponent(curve: &RiskCurve, window: (f64, f64)) -> Result<f64> {
    let pts: Vec<_> = curve
        .points
        .iter()
        .filter(|p| p.value >= window.0 && p.value <= window.1)
        .collect();
    let xs: Vec<f64> = pts.iter().map(|p| p.value).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.risk_mean).collect();
    fit_slope(&xs, &ys)
}
