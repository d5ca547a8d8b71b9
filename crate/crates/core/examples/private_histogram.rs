//! Laplace-noised histogram on [0, 1] against the density 1 + a(x - 1/2),
//! across bin counts.

use dp_minimax::bench::{histogram_risk_model, DistributionFamilySpec};
use dp_minimax::mechanisms::{private_histogram, HistogramSpec};
use dp_minimax::rng::RngStream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (a, n, eps, reps) = (0.8, 10_000, 1.0, 200);
    let family = DistributionFamilySpec::LipschitzDensity { a };
    println!("{:>4} {:>12} {:>12}", "k", "measured", "model");
    for k in [2, 4, 8, 16, 32] {
        let spec = HistogramSpec::new(1, k, eps);
        let (cells, square) = family.cell_integrals(k)?;
        let mut total = 0.0;
        for rep in 0..reps {
            let mut rng = RngStream::for_task(11, k as u32, rep).rng();
            let sample = family.sample(&mut rng, n, 1)?;
            let est = private_histogram(&sample, &spec, &mut rng)?;
            total += est.squared_l2_error(&cells, square)?;
        }
        println!(
            "{k:>4} {:>12.3e} {:>12.3e}",
            total / reps as f64,
            histogram_risk_model(k, n, eps, a)
        );
    }
    Ok(())
}
