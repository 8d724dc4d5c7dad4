//! Deterministic recursions behind the limit theorems: the generic linear
//! recursion `h_{n+1} = (1 - L_n/(n+1)) h_n + Q_n/(n+1)`, its squared
//! second-moment form, and the characteristic-function recursion whose limit
//! is the Gaussian characteristic function.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_OVERFLOW_GUARD: f64 = 1e12;

pub struct LinearRecursionSpec<L, Q> {
    pub l: L,
    pub q: Q,
    /// Limit of `L_n`; must be positive.
    pub l0: f64,
    /// Limit of `Q_n`; must be non-negative.
    pub q0: f64,
    /// Value at `n = 1`.
    pub h1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecursionPoint {
    pub n: u64,
    pub value: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionRun {
    pub target: f64,
    /// Values at `n = 1, 2, 5, 10, 20, 50, ...` and at `n_max`.
    pub checkpoints: Vec<RecursionPoint>,
    pub final_value: f64,
    pub final_residual: f64,
}

impl RecursionRun {
    /// Estimates the limit from the last two checkpoints assuming the error
    /// decays like `C n^{-exponent}`.
    ///
    /// When the contraction rate `L0` is below 1 the homogeneous part
    /// dominates and decays like `n^{-L0}`, so `exponent = L0` cancels the
    /// leading error term.
    pub fn extrapolated_limit(&self, exponent: f64) -> Option<f64> {
        let k = self.checkpoints.len();
        if k < 2 || exponent <= 0.0 {
            return None;
        }
        let (lo, hi) = (self.checkpoints[k - 2], self.checkpoints[k - 1]);
        let (wl, wh) = ((lo.n as f64).powf(exponent), (hi.n as f64).powf(exponent));
        Some((hi.value * wh - lo.value * wl) / (wh - wl))
    }
}

fn is_checkpoint(n: u64) -> bool {
    let mut m = n;
    while m >= 10 && m.is_multiple_of(10) {
        m /= 10;
    }
    matches!(m, 1 | 2 | 5)
}

fn iterate<F>(h1: f64, target: f64, n_max: u64, guard: f64, mut advance: F) -> Result<RecursionRun>
where
    F: FnMut(u64, f64) -> f64,
{
    if n_max < 1 {
        return Err(Error::Domain("recursion needs n_max >= 1".into()));
    }
    let mut h = h1;
    let mut checkpoints = Vec::new();
    for n in 1..=n_max {
        if !h.is_finite() || h.abs() > guard {
            return Err(Error::DivergenceDetected { n, value: h.abs(), guard });
        }
        if is_checkpoint(n) || n == n_max {
            checkpoints.push(RecursionPoint { n, value: h, residual: (h - target).abs() });
        }
        if n < n_max {
            h = advance(n, h);
        }
    }
    Ok(RecursionRun { target, checkpoints, final_value: h, final_residual: (h - target).abs() })
}

/// Iterates the linear recursion from `h_1` to `h_{n_max}` exactly as
/// written, with the default overflow guard.
pub fn solve_linear_recursion<L, Q>(spec: &LinearRecursionSpec<L, Q>, n_max: u64) -> Result<RecursionRun>
where
    L: Fn(u64) -> f64,
    Q: Fn(u64) -> f64,
{
    solve_linear_recursion_guarded(spec, n_max, DEFAULT_OVERFLOW_GUARD)
}

pub fn solve_linear_recursion_guarded<L, Q>(
    spec: &LinearRecursionSpec<L, Q>,
    n_max: u64,
    guard: f64,
) -> Result<RecursionRun>
where
    L: Fn(u64) -> f64,
    Q: Fn(u64) -> f64,
{
    if !(spec.l0 > 0.0) {
        return Err(Error::Domain(format!("L0 must be positive, got {}", spec.l0)));
    }
    if !(spec.q0 >= 0.0) {
        return Err(Error::Domain(format!("Q0 must be non-negative, got {}", spec.q0)));
    }
    iterate(spec.h1, spec.q0 / spec.l0, n_max, guard, |n, h| {
        let k = (n + 1) as f64;
        (1.0 - (spec.l)(n) / k) * h + (spec.q)(n) / k
    })
}

/// Iterates `b_{n+1} = (1 - a/(n+1))^2 b_n + sigma^2/(n+1)`, the second
/// moment of `X_{n+1} = (1 - a/(n+1)) X_n + K_{n+1}/sqrt(n+1)` with centered
/// innovations of variance `sigma^2`. The limit is `sigma^2 / (2a)`.
pub fn second_moment_recursion(a: f64, sigma_sq: f64, b1: f64, n_max: u64) -> Result<RecursionRun> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("contraction a must be positive, got {a}")));
    }
    iterate(b1, sigma_sq / (2.0 * a), n_max, DEFAULT_OVERFLOW_GUARD, |n, b| {
        let k = (n + 1) as f64;
        let shrink = 1.0 - a / k;
        shrink * shrink * b + sigma_sq / k
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfRecursionSpec {
    pub gamma: f64,
    pub sigma_sq: f64,
    pub t_grid: Vec<f64>,
    pub n_steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfPoint {
    pub t: f64,
    pub beta: f64,
    /// `exp(-t^2 sigma^2 / (2 (2 Gamma - 1)))`.
    pub gaussian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfRecursionResult {
    pub n_steps: u64,
    pub points: Vec<CfPoint>,
    pub sup_gap: f64,
    /// Set when some factor `1 - (t S_k)^2 sigma^2 / (2k)` is not positive.
    /// This happens at small `k` for large `|t|` and is reported, not clamped.
    pub nonpositive_factor: bool,
}

/// Contraction `B_j = 1 - (Gamma - 1/2)/(j + 1)`.
#[inline]
fn contraction(gamma: f64, j: u64) -> f64 {
    1.0 - (gamma - 0.5) / (j + 1) as f64
}

/// Evaluates `beta_N(t)` with `beta_1 = 1` and
/// `beta_{n+1}(t) = beta_n(B_n t) (1 - t^2 sigma^2 / (2(n+1)))`.
///
/// Unrolling the argument scaling gives
/// `beta_N(t) = prod_{k=2}^{N} (1 - (t S_k)^2 sigma^2 / (2k))` with the suffix
/// products `S_k = prod_{j=k}^{N-1} B_j`, accumulated backwards from `S_N = 1`.
pub fn beta(gamma: f64, sigma_sq: f64, t: f64, n_steps: u64) -> (f64, bool) {
    let mut scale = 1.0;
    let mut value = 1.0;
    let mut nonpositive = false;
    for k in (2..=n_steps).rev() {
        let arg = t * scale;
        let factor = 1.0 - arg * arg * sigma_sq / (2 * k) as f64;
        nonpositive |= factor <= 0.0;
        value *= factor;
        scale *= contraction(gamma, k - 1);
    }
    (value, nonpositive)
}

pub fn cf_recursion(spec: &CfRecursionSpec) -> Result<CfRecursionResult> {
    if spec.t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let excess = 2.0 * spec.gamma - 1.0;
    if !(excess > 0.0) {
        return Err(Error::CltConditionViolated { two_gamma_minus_one: excess });
    }
    if spec.n_steps < 1 {
        return Err(Error::Domain("cf recursion needs n_steps >= 1".into()));
    }
    let limit_variance = spec.sigma_sq / excess;
    let mut nonpositive_factor = false;
    let points: Vec<CfPoint> = spec
        .t_grid
        .iter()
        .map(|&t| {
            let (b, flag) = beta(spec.gamma, spec.sigma_sq, t, spec.n_steps);
            nonpositive_factor |= flag;
            CfPoint { t, beta: b, gaussian: (-0.5 * t * t * limit_variance).exp() }
        })
        .collect();
    let sup_gap = points.iter().map(|p| (p.beta - p.gaussian).abs()).fold(0.0, f64::max);
    Ok(CfRecursionResult { n_steps: spec.n_steps, points, sup_gap, nonpositive_factor })
}

/// `|e^{iy} - sum_{k=0}^{n} (iy)^k / k!|`.
pub fn taylor_remainder(y: f64, n: u32) -> f64 {
    let iy = Complex64::new(0.0, y);
    let mut term = Complex64::new(1.0, 0.0);
    let mut partial = term;
    for k in 1..=n {
        term = term * iy / k as f64;
        partial += term;
    }
    (Complex64::cis(y) - partial).norm()
}

/// `min{2|y|^n / n!, |y|^{n+1} / (n+1)!}`.
pub fn taylor_bound(y: f64, n: u32) -> f64 {
    let fact = |m: u32| (1..=m).map(f64::from).product::<f64>();
    let ay = y.abs();
    (2.0 * ay.powi(n as i32) / fact(n)).min(ay.powi(n as i32 + 1) / fact(n + 1))
}

/// Largest excess of the Taylor remainder of `e^{iy}` over its bound across
/// the grid (0 when the bound holds everywhere).
pub fn cf_taylor_bound_check(y_grid: &[f64], n: u32) -> Result<f64> {
    if n > 4 {
        return Err(Error::Domain(format!("expansion order must be 0..=4, got {n}")));
    }
    Ok(y_grid
        .iter()
        .map(|&y| (taylor_remainder(y, n) - taylor_bound(y, n)).max(0.0))
        .fold(0.0, f64::max))
}
