//! Machine-readable verdicts.
//!
//! Wall-clock times are deliberately absent: reports from identical configs
//! must be byte-identical. Timings are returned separately by the runner.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Acceptance band for a measured value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within { min: f64, max: f64 },
}

impl Bound {
    pub fn admits(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost(t) => v <= t,
            Bound::AtLeast(t) => v >= t,
            Bound::Within { min, max } => (min..=max).contains(&v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// `None` when the computation failed or produced a non-finite value.
    pub value: Option<f64>,
    pub bound: Bound,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn measured(name: impl Into<String>, value: f64, bound: Bound) -> Self {
        let finite = value.is_finite();
        Self {
            name: name.into(),
            value: finite.then_some(value),
            bound,
            pass: finite && bound.admits(value),
            note: None,
        }
    }

    pub fn failed(name: impl Into<String>, bound: Bound, why: impl ToString) -> Self {
        Self {
            name: name.into(),
            value: None,
            bound,
            pass: false,
            note: Some(why.to_string()),
        }
    }

    /// Runs `f`; an error becomes a failed record carrying its message.
    pub fn from_result<E: ToString>(name: impl Into<String>, bound: Bound, r: Result<f64, E>) -> Self {
        match r {
            Ok(v) => Self::measured(name, v, bound),
            Err(e) => Self::failed(name, bound, e),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A reported quantity without a pass/fail band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub name: String,
    pub value: Option<f64>,
}

impl Diagnostic {
    pub fn new(name: impl Into<String>, value: Option<f64>) -> Self {
        Self {
            name: name.into(),
            value: value.filter(|v| v.is_finite()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, checks: Vec<CheckRecord>, diagnostics: Vec<Diagnostic>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.into(),
            pass,
            checks,
            diagnostics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    /// sha256 of the canonical effective configuration.
    pub config_sha256: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub provenance: Provenance,
    pub suites: Vec<SuiteReport>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("inconsistent verdict: {0}")]
    Inconsistent(String),
}

impl VerificationReport {
    pub fn new(provenance: Provenance, suites: Vec<SuiteReport>) -> Self {
        let pass = suites.iter().all(|s| s.pass);
        Self {
            pass,
            provenance,
            suites,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Decodes and checks that every verdict is the AND of the flags below it.
    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        let r: VerificationReport = serde_json::from_str(text)?;
        r.check_consistency()?;
        Ok(r)
    }

    pub fn check_consistency(&self) -> Result<(), ReportError> {
        for s in &self.suites {
            if s.pass != s.checks.iter().all(|c| c.pass) {
                return Err(ReportError::Inconsistent(format!("suite {}", s.suite)));
            }
            for c in &s.checks {
                if c.pass && !c.value.is_some_and(|v| c.bound.admits(v)) {
                    return Err(ReportError::Inconsistent(format!("check {} passes outside its bound", c.name)));
                }
            }
        }
        if self.pass != self.suites.iter().all(|s| s.pass) {
            return Err(ReportError::Inconsistent("overall verdict".into()));
        }
        Ok(())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&str, &CheckRecord)> {
        self.suites
            .iter()
            .flat_map(|s| s.checks.iter().filter(|c| !c.pass).map(move |c| (s.suite.as_str(), c)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> VerificationReport {
        let checks = vec![
            CheckRecord::measured("wedge", 3.0e-16, Bound::AtMost(1e-12)),
            CheckRecord::measured("order", 3.92, Bound::Within { min: 3.7, max: 4.3 }),
            CheckRecord::failed("broken", Bound::AtLeast(1.0), "solver diverged"),
        ];
        let suite = SuiteReport::new("nahm", checks, vec![Diagnostic::new("exp", Some(2.06))]);
        VerificationReport::new(
            Provenance {
                version: "0.1.0".into(),
                config_sha256: "ab".repeat(32),
                seed: 1,
            },
            vec![suite],
        )
    }

    #[test]
    fn verdict_is_conjunction() {
        let r = sample();
        assert!(!r.pass && !r.suites[0].pass);
        assert_eq!(r.failures().count(), 1);
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(VerificationReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn non_finite_values_fail() {
        let c = CheckRecord::measured("x", f64::NAN, Bound::AtMost(1.0));
        assert!(!c.pass && c.value.is_none());
        let c = CheckRecord::measured("x", f64::INFINITY, Bound::AtLeast(1.0));
        assert!(!c.pass);
    }

    #[test]
    fn tampered_verdict_rejected() {
        let mut r = sample();
        r.pass = true;
        assert!(matches!(VerificationReport::from_json(&r.to_json()), Err(ReportError::Inconsistent(_))));
        let mut r = sample();
        r.suites[0].checks[2].pass = true;
        r.suites[0].pass = true;
        r.pass = true;
        assert!(VerificationReport::from_json(&r.to_json()).is_err());
    }

    #[test]
    fn key_order_is_stable() {
        let s = sample().to_json();
        let keys = ["\"pass\"", "\"provenance\"", "\"suites\""];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    proptest! {
        #[test]
        fn round_trip_any_values(vals in prop::collection::vec(-1e300f64..1e300, 1..20), tol in 1e-16f64..1e3) {
            let checks: Vec<_> = vals.iter().enumerate()
                .map(|(i, v)| CheckRecord::measured(format!("c{i}"), *v, Bound::AtMost(tol)))
                .collect();
            let r = VerificationReport::new(
                Provenance { version: "v".into(), config_sha256: String::new(), seed: 9 },
                vec![SuiteReport::new("s", checks, vec![])],
            );
            prop_assert_eq!(VerificationReport::from_json(&r.to_json()).unwrap(), r);
        }
    }
}
