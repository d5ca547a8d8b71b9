//! The truncated-mean estimator under its three noise configurations, with
//! the privacy quantities each one is calibrated against.

use dp_minimax::audit::approx_dp_gaussian_report;
use dp_minimax::mechanisms::{
    gaussian_output_kl, laplace_max_log_ratio, smooth_metric_distance, truncated_mean,
    MechanismSpec,
};
use dp_minimax::rng::{on_sphere, RngStream};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (r, d, n) = (1.0, 4, 500);
    let mut rng = RngStream::new(7, 0).rng();
    let sample: Vec<Vec<f64>> = (0..n).map(|_| on_sphere(&mut rng, d, r)).collect();

    let specs = [
        MechanismSpec::smooth_dp_laplace(r, d, n, 0.5),
        MechanismSpec::kl_gaussian(r, d, n, 0.5),
        MechanismSpec::approx_dp_gaussian(r, d, n, 0.5, 1e-6),
    ];
    for spec in &specs {
        let est = truncated_mean(&sample, spec, &mut rng)?;
        let norm = est.iter().map(|v| v * v).sum::<f64>().sqrt();
        println!(
            "{:<20} T = {:.3}  noise {:?}  |estimate| = {norm:.4}",
            spec.variant.as_str(),
            spec.truncation_radius(),
            spec.noise()
        );
    }

    // Worst-case neighbours: one point moved to the opposite side of the ball.
    let mut other = sample.clone();
    other[0] = sample[0].iter().map(|v| -v).collect();
    println!(
        "KL between outputs   = {:.6}",
        gaussian_output_kl(&specs[1], &sample, &other)?
    );
    let t = specs[0].truncation_radius();
    println!(
        "Laplace log ratio    = {:.6} (eps * metric distance = {:.6})",
        laplace_max_log_ratio(&specs[0], &sample, &other)?,
        specs[0].eps * smooth_metric_distance(&sample, &other, t)?
    );
    let g = approx_dp_gaussian_report(&specs[2])?;
    println!(
        "Gaussian delta at eps = {}: {:.3e} (requested {:.0e})",
        g.eps, g.achieved_delta, g.requested_delta
    );
    Ok(())
}
