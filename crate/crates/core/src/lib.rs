//! Privacy definitions, private estimators and minimax lower-bound machinery
//! for population estimation.
//!
//! The crate is organised around five layers:
//!
//! - [`prob`]: finite distributions, divergences, product measures, discrete
//!   channels, composition and the Le Cam testing bound.
//! - [`mechanisms`]: the truncated-mean estimator with its three noise
//!   configurations, the Laplace-noised histogram and the
//!   release-one-at-random channel.
//! - [`audit`]: exact decision procedures for DP, approximate DP, smooth DP,
//!   f-divergence privacy, the testing bound and conditional hypothesis
//!   testing privacy (CHTP), including the DP/CHTP parameter conversions and
//!   the constructive converse witness.
//! - [`bounds`]: the contraction inequality for TV-private channels, the
//!   two-point and packing constructions and closed-form lower-bound
//!   evaluators.
//! - [`bench`]: a seeded Monte Carlo risk harness with log-log exponent
//!   fitting.
//!
//! [`cli`] wires these into the `dp-minimax` binary. Runnable walkthroughs of
//! each capability live under `examples/`.
//!
//! ```
//! use dp_minimax::audit::audit_dp;
//! use dp_minimax::mechanisms::randomized_response;
//!
//! let channel = randomized_response(0.5).unwrap();
//! let verdict = audit_dp(&channel, 0.5).unwrap();
//! assert!(verdict.holds);
//! assert!((verdict.tight_param - 0.5).abs() < 1e-12);
//! ```

// `!(x >= 0.0)` guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod bench;
pub mod bounds;
pub mod cli;
mod error;
pub mod extended;
pub mod mechanisms;
pub mod prob;
pub mod rng;

pub use error::{Error, Result};

/// Additive slack used by every verdict comparison.
pub const VERDICT_SLACK: f64 = 1e-9;
