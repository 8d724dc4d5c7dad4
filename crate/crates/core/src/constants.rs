//! Closed-form limit quantities of the mixed urn.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::UrnParams;

/// Every closed-form constant the limit theorems refer to, in double precision.
///
/// `limit_variance` and `lil_scale` are `None` when the corresponding
/// condition (`clt_ok`, `lil_ok`) fails; the formulas have no meaning there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// Mean growth of the total per step, `(a+b)p + c(1-p)`.
    pub lambda: f64,
    /// Restoring strength `2bp / lambda`.
    pub gamma: f64,
    /// Limiting conditional variance of the normalized innovation.
    pub sigma_sq: f64,
    pub limit_variance: Option<f64>,
    /// `bp / lambda - 1`.
    pub alpha: f64,
    pub lil_scale: Option<f64>,
    /// Pathwise bound on the squared normalized innovation.
    pub cv_bound: f64,
    /// Pathwise bound on the martingale increment, `2a + 3b + 2c`.
    pub dm_bound: f64,
    pub clt_ok: bool,
    pub lil_ok: bool,
}

/// The rational subset of [`DerivedConstants`], computed without rounding.
///
/// `p` enters as the exact binary value of its `f64`, so `p = 0.25` is 1/4.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactConstants {
    pub lambda: BigRational,
    pub gamma: BigRational,
    pub sigma_sq: BigRational,
    pub limit_variance: Option<BigRational>,
    pub alpha: BigRational,
    pub clt_ok: bool,
    pub lil_ok: bool,
}

fn int(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Exact rational value of a finite `f64`.
pub(crate) fn exact_p(p: f64) -> BigRational {
    BigRational::from_f64(p).expect("validated p is finite")
}

pub fn exact_constants(params: &UrnParams) -> Result<ExactConstants> {
    params.require_positive_rules()?;
    let (a, b, c) = (int(params.a), int(params.b), int(params.c));
    let p = exact_p(params.p);
    let q = BigRational::one() - &p;
    let two = int(2);

    let lambda = (&a + &b) * &p + &c * &q;
    let bp = &b * &p;
    let gamma = &two * &bp / &lambda;
    let diff = &a - &b;
    let sigma_sq = (&p * &diff * &diff + &c * &c * &q) / (int(4) * &lambda * &lambda);
    let excess = &two * &gamma - BigRational::one();
    let clt_ok = excess.is_positive();
    let limit_variance = clt_ok.then(|| &sigma_sq / &excess);
    let alpha = &bp / &lambda - BigRational::one();
    // -bp/lambda < -1/2  <=>  2bp > lambda
    let lil_ok = &two * &bp > lambda;

    Ok(ExactConstants { lambda, gamma, sigma_sq, limit_variance, alpha, clt_ok, lil_ok })
}

/// Computes the closed forms. Requires `a, b, c >= 1`.
pub fn derived_constants(params: &UrnParams) -> Result<DerivedConstants> {
    let exact = exact_constants(params)?;
    let (a, b, c, p) = (params.a as f64, params.b as f64, params.c as f64, params.p);

    let lambda = (a + b) * p + c * (1.0 - p);
    let gamma = 2.0 * b * p / lambda;
    let sigma_sq = (p * (a - b).powi(2) + c * c * (1.0 - p)) / (4.0 * lambda * lambda);
    let alpha = b * p / lambda - 1.0;
    let dm_bound = 2.0 * a + 3.0 * b + 2.0 * c;
    let min_inc = params.min_increment() as f64;

    Ok(DerivedConstants {
        lambda,
        gamma,
        sigma_sq,
        limit_variance: exact.clt_ok.then(|| sigma_sq / (2.0 * gamma - 1.0)),
        alpha,
        lil_scale: exact.lil_ok.then(|| sigma_sq.sqrt() / (2.0 * alpha + 1.0).sqrt()),
        cv_bound: dm_bound * dm_bound / (min_inc * min_inc),
        dm_bound,
        clt_ok: exact.clt_ok,
        lil_ok: exact.lil_ok,
    })
}

impl DerivedConstants {
    /// `2 * Gamma - 1`, the contraction rate of the normalized recursion.
    pub fn excess(&self) -> f64 {
        2.0 * self.gamma - 1.0
    }

    /// Bound on `limsup E|D_n|` for the coupling process.
    pub fn coupling_d_bound(&self) -> Option<f64> {
        self.clt_ok.then(|| (4.0 * self.cv_bound / self.excess()).sqrt())
    }
}
