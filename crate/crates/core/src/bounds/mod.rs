//! Lower-bound machinery.
//!
//! The contraction inequality for TV-private channels is evaluated in closed
//! form and verified exactly on small instances; the two-point, packing and
//! mixture constructions used by the lower-bound proofs are built explicitly;
//! the resulting closed forms are exposed as evaluators.

mod constructions;
mod contraction;
mod evaluators;
mod mass;
mod packing;
mod report;
mod sweeps;

pub use constructions::{
    estimation_testing_chain, two_point_mean_construction, ChainReport, MixtureConstruction,
    TwoPointConstruction,
};
pub use contraction::{
    contraction_bound, contraction_bound_non_iid, random_tv_private_channel, verify_contraction,
    verify_contraction_non_iid, ContractionBound, ContractionCheck,
};
pub use evaluators::{
    define_p, density_lower_rate, dp_mean_lower_bound, packing_lower_bound, tv_mean_lower_bound,
    two_point_risk_bound, uniform_support_lower_bound, BoundEvaluation,
};
pub use mass::{
    random_mass_instance, verify_mass_everywhere, MassEverywhereCheck, MassEverywhereInstance,
};
pub use packing::{greedy_packing, PackingSet, PACKING_PROBES, PACKING_SEPARATION};
pub use report::{VerificationReport, Violation};
pub use sweeps::{
    chain_sweep, contraction_sweep, mass_everywhere_sweep, ChainSweepConfig,
    ContractionSweepConfig, MassSweepConfig, EXACT_TOLERANCE,
};
