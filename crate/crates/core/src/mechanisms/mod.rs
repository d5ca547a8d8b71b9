//! Concrete private estimators.
//!
//! The truncated mean `θ̂ = (1/n) Σ π_T(X_i) + W` comes in three noise
//! configurations ([`MechanismVariant`]); the histogram estimator adds Laplace
//! noise to bin frequencies; [`release_one_at_random`] and
//! [`randomized_response`] are small finite channels used by the auditors.

mod histogram;
mod release;
mod truncated_mean;

pub use histogram::{
    plain_histogram, private_histogram, HistogramDomain, HistogramEstimate, HistogramSpec,
};
pub use release::{randomized_response, release_one_at_random};
pub use truncated_mean::{
    gaussian_output_kl, laplace_log_density_ratio, laplace_max_log_ratio, mean_sensitivity,
    smooth_metric_distance, truncate_project, truncated_mean, truncated_mean_without_noise,
    MechanismSpec, MechanismVariant, NoiseModel,
};
