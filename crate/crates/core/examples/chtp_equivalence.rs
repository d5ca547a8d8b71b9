//! DP to CHTP parameter maps, a forward check and a converse witness built on
//! the uniform augmentation of a channel.

use dp_minimax::audit::{
    audit_chtp, audit_dp, chtp_converse_witness, chtp_params_from_dp, dp_params_from_chtp,
};
use dp_minimax::mechanisms::{randomized_response, release_one_at_random};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (eps, delta) in [(0.05, 0.0), (0.1, 1e-3), (0.2, 1e-6), (1.0, 1e-6)] {
        let (eps_ch, delta_ch) = chtp_params_from_dp(eps, delta)?;
        match dp_params_from_chtp(eps_ch, delta_ch) {
            Ok((back_eps, back_delta)) => println!(
                "(eps, delta) = ({eps}, {delta}) -> CHTP ({eps_ch:.5}, {delta_ch:.3e}) -> DP ({back_eps:.5}, {back_delta:.3e})"
            ),
            Err(_) => println!("(eps, delta) = ({eps}, {delta}) -> CHTP ({eps_ch:.5}, {delta_ch:.3e}), vacuous since eps_ch >= 1"),
        }
    }

    let rr = randomized_response(0.15)?;
    let eps = audit_dp(&rr, 0.15)?.tight_param;
    let (eps_ch, delta_ch) = chtp_params_from_dp(eps, 0.0)?;
    let v = audit_chtp(&rr, eps_ch, delta_ch)?;
    println!(
        "randomized response eps = {eps:.3}: CHTP at {eps_ch:.4} holds = {} (tight {:.4})",
        v.holds, v.tight_param
    );

    let alphabet: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
    let release = release_one_at_random(alphabet, 2)?;
    if let Some(w) = chtp_converse_witness(&release, 1.0, 0.1)? {
        println!(
            "release-one violates (1, 0.1)-DP by {:.3} on {:?}; augmented test error sum {:.4} < {:.4}, conditioning mass {:.4} >= {:.4}",
            w.violation,
            w.violating_set,
            w.error_sum,
            1.0 - w.eps_ch,
            w.conditioning_mass,
            w.delta_ch
        );
    }
    Ok(())
}
