//! Exact privacy audits of finite channels and analytic audits of the
//! continuous mechanisms.
//!
//! Every auditor returns a [`PrivacyVerdict`] whose `tight_param` is the
//! smallest parameter at which the definition holds (or, for CHTP, the
//! largest admissible conditional-test advantage). `holds` compares it to the
//! requested parameter with additive slack [`VERDICT_SLACK`](crate::VERDICT_SLACK).

mod chtp;
mod definitions;
mod gaussian;
mod processing;
mod verdict;

pub use chtp::{
    audit_chtp, chtp_converse_witness, chtp_params_from_dp, dp_params_from_chtp, ConverseWitness,
    CHTP_OUTPUT_LIMIT,
};
pub use definitions::{
    audit_approx_dp, audit_dp, audit_f_privacy, audit_smooth_dp, audit_smooth_dp_laplace,
    audit_testing_bound, disclosure_risk_floor, MetricSpec, SamplePair,
};
pub use gaussian::{approx_dp_gaussian_report, gaussian_delta_profile, GaussianDeltaReport};
pub use processing::{check_information_processing, ParameterComparison, ProcessingReport};
pub use verdict::{PrivacyDefinition, PrivacyVerdict, Witness};

use crate::prob::DiscreteChannel;

/// Output labels selected by `mask` (bit `j` ↔ output `j`).
pub(crate) fn outputs_of_mask(q: &DiscreteChannel, mask: u64) -> Vec<String> {
    q.output_set()
        .iter()
        .enumerate()
        .filter(|(j, _)| mask >> j & 1 == 1)
        .map(|(_, o)| o.clone())
        .collect()
}
