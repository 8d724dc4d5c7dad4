use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    /// `|observed - target| <= tolerance`
    TwoSided,
    /// `observed <= target + tolerance`
    AtMost,
    /// `observed < target`
    LessThan,
    /// `observed > target`
    GreaterThan,
}

/// Pass/fail record for one criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub observed: f64,
    pub target: f64,
    pub tolerance: f64,
    pub sense: Sense,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub standard_error: Option<f64>,
    /// Too few replicates for the check to mean anything; never counted as a
    /// failure.
    #[serde(default)]
    pub low_power: bool,
}

impl Verdict {
    pub fn new(id: impl Into<String>, sense: Sense, observed: f64, target: f64, tolerance: f64) -> Self {
        let pass = match sense {
            Sense::TwoSided => (observed - target).abs() <= tolerance,
            Sense::AtMost => observed <= target + tolerance,
            Sense::LessThan => observed < target,
            Sense::GreaterThan => observed > target,
        };
        Verdict { id: id.into(), observed, target, tolerance, sense, pass, standard_error: None, low_power: false }
    }

    pub fn two_sided(id: impl Into<String>, observed: f64, target: f64, tolerance: f64) -> Self {
        Self::new(id, Sense::TwoSided, observed, target, tolerance)
    }

    pub fn at_most(id: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self::new(id, Sense::AtMost, observed, bound, 0.0)
    }

    /// Zero-violation check over a count.
    pub fn no_violations(id: impl Into<String>, count: u64) -> Self {
        Self::at_most(id, count as f64, 0.0)
    }

    pub fn with_standard_error(mut self, se: f64) -> Self {
        self.standard_error = Some(se);
        self
    }

    pub fn with_low_power(mut self, low_power: bool) -> Self {
        self.low_power = low_power;
        self
    }

    /// Passing, or exempt because the check is underpowered.
    pub fn acceptable(&self) -> bool {
        self.pass || self.low_power
    }
}
