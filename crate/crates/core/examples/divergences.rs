//! TV, KL and a custom f-divergence between two small distributions, plus
//! the Le Cam testing error and a product measure.

use dp_minimax::prob::{
    f_divergence, kl_divergence, le_cam_error, product_distribution, tv_distance, FDivergenceSpec,
    FiniteDistribution,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let outcomes: Vec<String> = ["lo", "mid", "hi"].iter().map(|s| s.to_string()).collect();
    let p = FiniteDistribution::new(outcomes.clone(), vec![0.5, 0.3, 0.2])?;
    let q = FiniteDistribution::new(outcomes, vec![0.2, 0.3, 0.5])?;

    println!("TV(p, q)         = {:.6}", tv_distance(&p, &q)?);
    println!("KL(p || q)       = {:.6}", kl_divergence(&p, &q)?);
    println!(
        "chi^2(p || q)    = {:.6}",
        f_divergence(&FDivergenceSpec::chi_square(), &p, &q)?
    );
    println!(
        "Hellinger^2      = {:.6}",
        f_divergence(&FDivergenceSpec::hellinger(), &p, &q)?
    );

    let jensen = FDivergenceSpec::custom(
        "js-like",
        |t: f64| t * t.ln() - (1.0 + t) * ((1.0 + t) / 2.0).ln(),
        2f64.ln(),
    )?;
    println!("custom f         = {:.6}", f_divergence(&jensen, &p, &q)?);

    println!("Le Cam error     = {:.6}", le_cam_error(&p, &q)?);
    let p3 = product_distribution(&[p.clone(), p.clone(), p])?;
    let q3 = product_distribution(&[q.clone(), q.clone(), q])?;
    println!(
        "TV of 3-fold products = {:.6} over {} outcomes",
        tv_distance(&p3, &q3)?,
        p3.len()
    );
    Ok(())
}
