use lucasian::{decimal_digits, Candidate, Outcome, Sign, SunParams, Verdict};
use serde::{Deserialize, Serialize};

/// One tested candidate, as written to standard output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub verdict: Outcome,
    pub rule: String,
    pub k: u64,
    pub m: u64,
    pub sign: Sign,
    pub digits: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<SunParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl ResultRecord {
    pub fn from_verdict(cand: &Candidate, verdict: &Verdict, elapsed_ms: Option<f64>) -> Self {
        ResultRecord {
            verdict: verdict.outcome,
            rule: verdict.rule.clone(),
            k: cand.k(),
            m: cand.m(),
            sign: cand.sign(),
            digits: decimal_digits(cand.n()),
            params: verdict.params,
            witness: verdict.witness.as_ref().map(|w| w.to_string()),
            reason: verdict.reason.clone(),
            elapsed_ms,
        }
    }

    /// A record for input that never became a [`Candidate`].
    pub fn invalid(k: u64, m: u64, sign: Sign, reason: impl Into<String>) -> Self {
        ResultRecord {
            verdict: Outcome::NotApplicable,
            rule: "none".into(),
            k,
            m,
            sign,
            digits: 0,
            params: None,
            witness: None,
            reason: Some(reason.into()),
            elapsed_ms: None,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

/// Milliseconds with microsecond resolution.
pub fn millis(d: std::time::Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}
