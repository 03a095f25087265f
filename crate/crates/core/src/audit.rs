//! Structured verdicts for checked inequalities and identities.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// A sub-computation ran out of budget or precision; nothing was decided.
    Unverified,
    /// The premise of the checked statement does not hold for this input.
    HypothesisFailed,
}

/// One checked statement. Numbers are decimal strings; `margin ≥ 0` iff the statement holds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub id: String,
    pub lhs: String,
    pub rhs: String,
    pub margin: String,
    pub verdict: Verdict,
}

impl AuditEntry {
    pub fn new(id: impl Into<String>, lhs: String, rhs: String, margin: String, verdict: Verdict) -> Self {
        AuditEntry {
            id: id.into(),
            lhs,
            rhs,
            margin,
            verdict,
        }
    }

    /// `lhs ≥ rhs`, decided exactly (certified sign of `lhs - rhs`).
    pub fn ge(id: impl Into<String>, lhs: &Real, rhs: &Real) -> Self {
        let margin = lhs - rhs;
        let verdict = match margin.try_signum() {
            Ok(Ordering::Less) => Verdict::Fail,
            Ok(_) => Verdict::Pass,
            Err(_) => Verdict::Unverified,
        };
        AuditEntry::new(id, lhs.to_decimal_string(), rhs.to_decimal_string(), margin.to_decimal_string(), verdict)
    }

    /// `lhs ≤ rhs`; margin is `rhs - lhs`.
    pub fn le(id: impl Into<String>, lhs: &Real, rhs: &Real) -> Self {
        let mut e = AuditEntry::ge(id, rhs, lhs);
        std::mem::swap(&mut e.lhs, &mut e.rhs);
        e
    }

    /// Floating-point comparison `|lhs - rhs| ≤ tol`; margin is `tol - |lhs - rhs|`.
    pub fn within(id: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = tol - (lhs - rhs).abs();
        let verdict = if margin >= 0.0 { Verdict::Pass } else { Verdict::Fail };
        AuditEntry::new(id, format!("{lhs:.12}"), format!("{rhs:.12}"), format!("{margin:.12}"), verdict)
    }

    pub fn from_error(id: impl Into<String>, err: &Error) -> Self {
        let verdict = if err.is_budget() { Verdict::Unverified } else { Verdict::Fail };
        AuditEntry::new(id, String::new(), String::new(), err.to_string(), verdict)
    }

    pub fn hypothesis_failed(id: impl Into<String>, reason: String) -> Self {
        AuditEntry::new(id, String::new(), String::new(), reason, Verdict::HypothesisFailed)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    pub fn new() -> Self {
        AuditReport::default()
    }

    pub fn push(&mut self, e: AuditEntry) {
        self.entries.push(e);
    }

    pub fn extend(&mut self, other: AuditReport) {
        self.entries.extend(other.entries);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(AuditEntry::passed)
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.entries.iter().filter(|e| e.verdict == v).count()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &AuditEntry> {
        self.entries.iter()
    }
}

impl FromIterator<AuditEntry> for AuditReport {
    fn from_iter<I: IntoIterator<Item = AuditEntry>>(iter: I) -> Self {
        AuditReport {
            entries: iter.into_iter().collect(),
        }
    }
}
