use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub instance: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub detail: String,
}

/// Outcome of a verification sweep. `max_slack_used` is the largest amount by
/// which a left-hand side exceeded its bound while still passing within
/// tolerance (zero when every instance held outright).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub instances: usize,
    pub violations: Vec<Violation>,
    pub max_slack_used: f64,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        VerificationReport {
            check: check.into(),
            instances: 0,
            violations: Vec::new(),
            max_slack_used: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Records `lhs ≤ rhs + tolerance` for one instance.
    pub fn record(
        &mut self,
        instance: usize,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) {
        self.instances += 1;
        let excess = lhs - rhs;
        if excess > tolerance || lhs.is_nan() || rhs.is_nan() {
            self.violations.push(Violation {
                instance,
                lhs,
                rhs,
                detail: detail.into(),
            });
        } else if excess > self.max_slack_used {
            self.max_slack_used = excess;
        }
    }
}
