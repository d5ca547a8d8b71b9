//! Closed-form lower bounds, the contraction inequality on a mixed channel
//! and the two-point construction behind the mean-estimation bound.

use dp_minimax::audit::audit_f_privacy;
use dp_minimax::bounds::{
    density_lower_rate, dp_mean_lower_bound, estimation_testing_chain, greedy_packing,
    packing_lower_bound, random_tv_private_channel, tv_mean_lower_bound,
    two_point_mean_construction, uniform_support_lower_bound, verify_contraction,
};
use dp_minimax::prob::{FDivergenceSpec, FiniteDistribution};
use dp_minimax::rng::RngStream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "tv_mean(r=1, k=2, n=100, eps=0.1)        = {}",
        tv_mean_lower_bound(1.0, 2.0, 100, 0.1)?.value
    );
    println!(
        "uniform_support(1, 100, 0.1)             = {}",
        uniform_support_lower_bound(1.0, 100, 0.1)?
    );
    println!(
        "packing(m=2, c=0, eps=1, delta=0)        = {}",
        packing_lower_bound(2, 0, 1.0, 0.0)?
    );
    let dp = dp_mean_lower_bound(1.0, f64::INFINITY, 8, 1000, 1.0, 1e-6)?;
    println!(
        "dp_mean(d=8, n=1000, eps=1, delta=1e-6)  = {:.3e} (rate {:.3e})",
        dp.value,
        dp.asymptotic.unwrap_or(f64::NAN)
    );
    println!(
        "density rate (d=1, n=1e4, eps=1)         = {:.4e}",
        density_lower_rate(1, 10_000, 1.0)?
    );

    let mut rng = RngStream::new(3, 0).rng();
    let packing = greedy_packing(3, &mut rng);
    println!(
        "greedy 1/2-packing of the sphere in R^3: {} points",
        packing.points.len()
    );

    let labels: Vec<String> = ["x0", "x1"].iter().map(|s| s.to_string()).collect();
    let outputs: Vec<String> = ["t0", "t1", "t2"].iter().map(|s| s.to_string()).collect();
    let q = random_tv_private_channel(&mut rng, labels.clone(), 3, outputs.clone(), 0.2)?;
    let p0 = FiniteDistribution::new(labels.clone(), vec![0.7, 0.3])?;
    let p1 = FiniteDistribution::new(labels, vec![0.4, 0.6])?;
    let c = verify_contraction(&q, &p0, &p1)?;
    println!(
        "contraction: eps_tv = {:.4}, TV(M0, M1) = {:.5} <= {:.5}",
        c.eps_tv, c.lhs, c.bound.value
    );

    let twopoint_q = random_tv_private_channel(
        &mut rng,
        dp_minimax::bounds::TwoPointConstruction::labels(),
        2,
        outputs,
        0.1,
    )?;
    let eps_tv = audit_f_privacy(&twopoint_q, &FDivergenceSpec::TotalVariation, 1.0)?.tight_param;
    let construction = two_point_mean_construction(1.0, 2.0, (1.0 / (8.0 * eps_tv)).min(1.0))?;
    let chain = estimation_testing_chain(&twopoint_q, &construction)?;
    println!(
        "two-point chain at eps_tv = {:.4}: bayes risk {:.5} >= reduction {:.5} >= closed form {:.5}",
        chain.eps_tv, chain.bayes_risk, chain.reduction, chain.closed_form
    );
    Ok(())
}
