use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five constants of the mixed urn plus its initial composition.
///
/// With probability `p` the Friedman rule adds `a` balls of the drawn type
/// and `b` of the opposite type; otherwise the Polya rule adds `c` balls of
/// the drawn type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UrnParams {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub p: f64,
    pub y1_0: u64,
    pub y2_0: u64,
}

impl UrnParams {
    /// Builds and validates parameters.
    pub fn new(a: u64, b: u64, c: u64, p: f64, y1_0: u64, y2_0: u64) -> Result<Self> {
        validate_params(UrnParams { a, b, c, p, y1_0, y2_0 })
    }

    /// Builds parameters from signed inputs, as they arrive from config files
    /// and flags, rejecting negative counts.
    pub fn from_signed(a: i64, b: i64, c: i64, p: f64, y1_0: i64, y2_0: i64) -> Result<Self> {
        fn count(field: &'static str, v: i64) -> Result<u64> {
            u64::try_from(v).map_err(|_| Error::OutOfRange {
                field,
                reason: format!("count must be non-negative, got {v}"),
            })
        }
        Self::new(
            count("a", a)?,
            count("b", b)?,
            count("c", c)?,
            p,
            count("y1_0", y1_0)?,
            count("y2_0", y2_0)?,
        )
    }

    pub fn t0(&self) -> u64 {
        self.y1_0 + self.y2_0
    }

    /// Smallest and largest per-step growth of the total, `min/max{a+b, c}`.
    pub fn min_increment(&self) -> u64 {
        (self.a + self.b).min(self.c)
    }

    pub fn max_increment(&self) -> u64 {
        (self.a + self.b).max(self.c)
    }

    /// The theorems are stated for positive integers a, b, c.
    pub fn require_positive_rules(&self) -> Result<()> {
        if self.a == 0 || self.b == 0 || self.c == 0 {
            return Err(Error::TheoremPreconditionViolated(format!(
                "a, b, c must all be positive (got a={}, b={}, c={})",
                self.a, self.b, self.c
            )));
        }
        Ok(())
    }

    /// True when one color is absent initially, so Z_0 lies on the boundary
    /// of [0, 1] rather than strictly inside it.
    pub fn degenerate_start(&self) -> bool {
        self.y1_0 == 0 || self.y2_0 == 0
    }
}

/// Returns the parameters unchanged when every invariant holds.
pub fn validate_params(raw: UrnParams) -> Result<UrnParams> {
    if !(raw.p > 0.0 && raw.p < 1.0) {
        return Err(Error::OutOfRange {
            field: "p",
            reason: format!("must lie strictly inside (0, 1), got {}", raw.p),
        });
    }
    if raw.c < 1 {
        return Err(Error::OutOfRange {
            field: "c",
            reason: "Polya increment must be at least 1".into(),
        });
    }
    if raw.y1_0.checked_add(raw.y2_0).is_none_or(|t| t == 0) {
        return Err(Error::OutOfRange {
            field: "T0",
            reason: "initial total y1_0 + y2_0 must be positive".into(),
        });
    }
    Ok(raw)
}
