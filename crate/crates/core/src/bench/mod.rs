//! Monte Carlo risk harness.
//!
//! [`risk_sweep`] runs a mechanism on fresh samples from a distribution
//! family across a one-dimensional grid, [`fit_exponent`] reads off log-log
//! slopes, [`table1_report`] compares measured exponents and dimension ratios
//! against the theoretical rates, and [`lemma_property_suite`] checks the
//! truncation lemmas by simulation.
//!
//! Every replication draws from its own stream `(master_seed, grid, rep)` and
//! per-replication losses are summed in index order, so results are
//! bit-identical for any worker count.

mod family;
mod fit;
mod lemma;
mod output;
mod sweep;
mod table1;

pub use family::DistributionFamilySpec;
pub use fit::{fit_exponent, fit_slope};
pub use lemma::{lemma_property_suite, LemmaCheck, LemmaSuiteReport, LEMMA_CONFIGS, LEMMA_DRAWS};
pub use output::{write_csv, CSV_COLUMNS};
pub use sweep::MIN_REPS;
pub use sweep::{
    histogram_risk_model, risk_sweep, RiskCurve, RiskPoint, Sweep, SweepAxis, SweepMechanism,
};
pub use table1::{table1_report, Table1Check, Table1Config, Table1Report};
