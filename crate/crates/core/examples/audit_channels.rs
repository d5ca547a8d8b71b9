//! Audits randomized response and the release-one-at-random channel under
//! several privacy definitions.

use dp_minimax::audit::{
    audit_approx_dp, audit_chtp, audit_dp, audit_f_privacy, audit_smooth_dp, audit_testing_bound,
    disclosure_risk_floor, MetricSpec, PrivacyVerdict,
};
use dp_minimax::mechanisms::{randomized_response, release_one_at_random};
use dp_minimax::prob::FDivergenceSpec;

fn show(name: &str, v: &PrivacyVerdict) {
    println!(
        "  {name:<14} holds={:<5} tight={:.6} requested={}",
        v.holds, v.tight_param, v.requested
    );
    if let (false, Some(w)) = (v.holds, &v.witness) {
        println!(
            "    witness {:?} on {:?}: {}",
            w.datasets, w.outputs, w.description
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rr = randomized_response(1.0)?;
    println!("randomized response, eps = 1");
    show("dp", &audit_dp(&rr, 1.0)?);
    show("approx_dp", &audit_approx_dp(&rr, 0.5, 0.1)?);
    show("testing_bound", &audit_testing_bound(&rr, 0.5, 0.1)?);
    show(
        "tv",
        &audit_f_privacy(&rr, &FDivergenceSpec::TotalVariation, 0.5)?,
    );
    show(
        "kl",
        &audit_f_privacy(&rr, &FDivergenceSpec::KullbackLeibler, 0.5)?,
    );
    show(
        "smooth_dp",
        &audit_smooth_dp(&rr, &MetricSpec::discrete(2), 1.0)?,
    );
    println!(
        "  error-sum floor at (1, 0): {:.6}",
        disclosure_risk_floor(1.0, 0.0)
    );

    let alphabet: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let release = release_one_at_random(alphabet, 2)?;
    println!("release one entry at random, n = 2");
    show("approx_dp", &audit_approx_dp(&release, 1.0, 0.5)?);
    show(
        "tv",
        &audit_f_privacy(&release, &FDivergenceSpec::TotalVariation, 0.5)?,
    );
    show("chtp", &audit_chtp(&release, 0.5, 0.0)?);
    Ok(())
}
