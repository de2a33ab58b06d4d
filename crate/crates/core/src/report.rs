//! Uniform record for one evaluated inequality.

use serde::Serialize;

/// Relative tolerance for equality flags and pass/fail verdicts.
pub const EQUALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    /// `left <= right`
    Upper,
    /// `left >= right`
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Estimate,
    Mc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub name: String,
    pub statement: String,
    pub sense: Sense,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub left: Option<f64>,
    pub right: Option<f64>,
    pub slack: Option<f64>,
    /// `None` when not applicable.
    pub holds: Option<bool>,
    pub equality: bool,
    /// Half-width of a confidence interval on `left`, for sampled values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<f64>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub witnesses: serde_json::Value,
    pub provenance: Provenance,
}

impl InequalityReport {
    pub fn evaluate(
        name: impl Into<String>,
        statement: impl Into<String>,
        sense: Sense,
        left: f64,
        right: f64,
        provenance: Provenance,
    ) -> Self {
        let slack = match sense {
            Sense::Upper => right - left,
            Sense::Lower => left - right,
        };
        let scale = 1f64.max(left.abs()).max(right.abs());
        Self {
            name: name.into(),
            statement: statement.into(),
            sense,
            applicable: true,
            reason: None,
            left: Some(left),
            right: Some(right),
            slack: Some(slack),
            holds: Some(slack >= -EQUALITY_TOL * scale),
            equality: slack.abs() <= EQUALITY_TOL * scale,
            uncertainty: None,
            witnesses: serde_json::Value::Null,
            provenance,
        }
    }

    pub fn not_applicable(
        name: impl Into<String>,
        statement: impl Into<String>,
        sense: Sense,
        reason: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            sense,
            applicable: false,
            reason: Some(reason.into()),
            left: None,
            right: None,
            slack: None,
            holds: None,
            equality: false,
            uncertainty: None,
            witnesses: serde_json::Value::Null,
            provenance: Provenance::Exact,
        }
    }

    /// Marks the left value as sampled with the given confidence half-width;
    /// the verdict fails only when the bound lies outside the interval.
    pub fn with_uncertainty(mut self, half_width: f64) -> Self {
        self.uncertainty = Some(half_width);
        if let (Some(slack), Some(left), Some(right)) = (self.slack, self.left, self.right) {
            let scale = 1f64.max(left.abs()).max(right.abs());
            self.holds = Some(slack >= -(EQUALITY_TOL * scale + half_width));
            self.equality = slack.abs() <= EQUALITY_TOL * scale + half_width;
        }
        self
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    pub fn with_witnesses(mut self, witnesses: serde_json::Value) -> Self {
        self.witnesses = witnesses;
        self
    }

    pub fn violated(&self) -> bool {
        self.holds == Some(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_sign_conventions() {
        let up = InequalityReport::evaluate("u", "", Sense::Upper, 1.0, 3.0, Provenance::Exact);
        assert_eq!(up.slack, Some(2.0));
        assert_eq!(up.holds, Some(true));
        let low = InequalityReport::evaluate("l", "", Sense::Lower, 1.0, 3.0, Provenance::Exact);
        assert_eq!(low.slack, Some(-2.0));
        assert!(low.violated());
        let eq = InequalityReport::evaluate("e", "", Sense::Lower, 2.0, 2.0 + 1e-12, Provenance::Exact);
        assert!(eq.equality && eq.holds == Some(true));
    }

    #[test]
    fn uncertainty_widens_verdict() {
        let r = InequalityReport::evaluate("m", "", Sense::Lower, 0.99, 1.0, Provenance::Mc).with_uncertainty(0.02);
        assert_eq!(r.holds, Some(true));
        let r = InequalityReport::evaluate("m", "", Sense::Lower, 0.9, 1.0, Provenance::Mc).with_uncertainty(0.02);
        assert!(r.violated());
    }
}
