//! Machine-readable verdicts of identity checks.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::series::{render_rational, Monomial, Rational, Series, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// First point where the two sides disagree. Rational-point checks report the
/// constant monomial and name the failing instance in `context`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub monomial: Monomial,
    pub lhs: String,
    pub rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCounts {
    pub lhs: usize,
    pub rhs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: BTreeMap<String, String>,
    pub truncation: Option<Truncation>,
    pub status: Status,
    pub first_mismatch: Option<Mismatch>,
    pub wall_time_ms: u64,
    pub term_counts: TermCounts,
    pub seed: Option<u64>,
}

impl IdentityReport {
    pub fn new(identity: impl Into<String>) -> Self {
        IdentityReport {
            identity: identity.into(),
            params: BTreeMap::new(),
            truncation: None,
            status: Status::Pass,
            first_mismatch: None,
            wall_time_ms: 0,
            term_counts: TermCounts::default(),
            seed: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_truncation(mut self, trunc: Truncation) -> Self {
        self.truncation = Some(trunc);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn fail_with(&mut self, mismatch: Mismatch) {
        if self.first_mismatch.is_none() {
            self.first_mismatch = Some(mismatch);
        }
        self.status = Status::Fail;
    }

    /// Compares two series; the first failing comparison is the one reported.
    pub fn record_series(&mut self, lhs: &Series, rhs: &Series, context: Option<String>) -> bool {
        self.term_counts.lhs += lhs.len();
        self.term_counts.rhs += rhs.len();
        match lhs.first_difference(rhs) {
            None => true,
            Some((monomial, l, r)) => {
                self.fail_with(Mismatch {
                    monomial,
                    lhs: render_rational(&l),
                    rhs: render_rational(&r),
                    context,
                });
                false
            }
        }
    }

    pub fn record_values(&mut self, lhs: &Rational, rhs: &Rational, context: Option<String>) -> bool {
        self.term_counts.lhs += 1;
        self.term_counts.rhs += 1;
        if lhs == rhs {
            true
        } else {
            self.fail_with(Mismatch {
                monomial: Monomial::ONE,
                lhs: render_rational(lhs),
                rhs: render_rational(rhs),
                context,
            });
            false
        }
    }

    /// Marks the check failed for a reason other than a value mismatch
    /// (for example an integrality assertion inside a computation).
    pub fn record_failure(&mut self, context: String) {
        self.fail_with(Mismatch {
            monomial: Monomial::ONE,
            lhs: String::new(),
            rhs: String::new(),
            context: Some(context),
        });
    }

    /// Folds a sub-report into this one.
    pub fn absorb(&mut self, other: &IdentityReport) {
        self.term_counts.lhs += other.term_counts.lhs;
        self.term_counts.rhs += other.term_counts.rhs;
        if let Some(m) = &other.first_mismatch {
            let mut m = m.clone();
            let prefix = other.identity.clone();
            m.context = Some(match m.context {
                Some(c) => format!("{prefix}: {c}"),
                None => prefix,
            });
            self.fail_with(m);
        } else if !other.passed() {
            self.status = Status::Fail;
        }
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.wall_time_ms = started.elapsed().as_millis() as u64;
        self
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        write!(f, "{status} {}", self.identity)?;
        if !self.params.is_empty() {
            let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            write!(f, " [{}]", params.join(", "))?;
        }
        if let Some(t) = &self.truncation {
            write!(f, " ({t})")?;
        }
        if let Some(seed) = self.seed {
            write!(f, " seed={seed}")?;
        }
        write!(
            f,
            " terms={}/{} time={}ms",
            self.term_counts.lhs, self.term_counts.rhs, self.wall_time_ms
        )?;
        if let Some(m) = &self.first_mismatch {
            write!(f, "\n  first mismatch at {}: lhs={} rhs={}", m.monomial, m.lhs, m.rhs)?;
            if let Some(c) = &m.context {
                write!(f, " ({c})")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::int;

    #[test]
    fn first_failure_is_kept() {
        let trunc = Truncation::new(2, 2);
        let mut r = IdentityReport::new("demo");
        assert!(r.record_series(&Series::one(trunc), &Series::one(trunc), None));
        assert!(r.passed());
        let two = Series::constant(int(2), trunc);
        assert!(!r.record_series(&Series::one(trunc), &two, Some("first".into())));
        assert!(!r.record_values(&int(1), &int(3), Some("second".into())));
        assert!(!r.passed());
        let m = r.first_mismatch.unwrap();
        assert_eq!(m.context.as_deref(), Some("first"));
        assert_eq!(m.rhs, "2/1");
    }
}
