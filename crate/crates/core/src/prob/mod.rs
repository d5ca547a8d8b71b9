//! Probability primitives on finite spaces.

mod channel;
mod distribution;
mod divergence;

pub use channel::{
    channel_marginal, compose_channels, dataset_distribution, DiscreteChannel, NeighborPair,
};
pub use distribution::{product_distribution, product_distribution_with_cap, FiniteDistribution};
pub(crate) use divergence::f_divergence_slices;
pub use divergence::{f_divergence, kl_divergence, le_cam_error, tv_distance, FDivergenceSpec};

/// Largest dataset space (and product space) the crate will tabulate.
pub const DEFAULT_ENUMERATION_CAP: usize = 10_000;

/// Tolerance on `Σ p = 1` for a valid distribution.
pub const NORMALIZATION_TOL: f64 = 1e-12;
