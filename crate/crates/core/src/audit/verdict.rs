use serde::{Deserialize, Serialize};

use crate::VERDICT_SLACK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrivacyDefinition {
    Dp,
    ApproxDp,
    SmoothDp,
    Tv,
    Kl,
    FDiv,
    TestingBound,
    Chtp,
}

/// The extremal dataset pair and output set behind a tight parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Dataset keys `[x, x′]`, ordered so that the witness inequality reads
    /// `Q(A | x)` against `Q(A | x′)`.
    pub datasets: [String; 2],
    pub outputs: Vec<String>,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyVerdict {
    pub definition: PrivacyDefinition,
    pub holds: bool,
    #[serde(with = "crate::extended")]
    pub tight_param: f64,
    #[serde(with = "crate::extended")]
    pub requested: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl PrivacyVerdict {
    pub fn new(
        definition: PrivacyDefinition,
        tight_param: f64,
        requested: f64,
        witness: Option<Witness>,
    ) -> Self {
        PrivacyVerdict {
            definition,
            holds: tight_param <= requested + VERDICT_SLACK,
            tight_param,
            requested,
            witness,
            notes: Vec::new(),
        }
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holds_uses_slack() {
        assert!(PrivacyVerdict::new(PrivacyDefinition::Dp, 1.0 + 5e-10, 1.0, None).holds);
        assert!(!PrivacyVerdict::new(PrivacyDefinition::Dp, 1.0 + 2e-9, 1.0, None).holds);
        assert!(
            PrivacyVerdict::new(PrivacyDefinition::Dp, f64::INFINITY, f64::INFINITY, None).holds
        );
    }

    #[test]
    fn json_shape() {
        let v = PrivacyVerdict::new(PrivacyDefinition::ApproxDp, f64::INFINITY, 0.5, None);
        let text = serde_json::to_string(&v).unwrap();
        assert_eq!(
            text,
            r#"{"definition":"approx_dp","holds":false,"tight_param":"inf","requested":0.5}"#
        );
        assert_eq!(serde_json::from_str::<PrivacyVerdict>(&text).unwrap(), v);
    }
}
