use serde::{Deserialize, Serialize};

use super::Verdict;
use crate::constants::DerivedConstants;
use crate::dynamics::UrnState;
use crate::error::Result;
use crate::exact::conditional_checks_at;
use crate::params::UrnParams;
use crate::simulate::{run_path, validate_checkpoints};

/// Checks `T_n / n` against `lambda`.
///
/// The band is four standard deviations of the i.i.d. increment mean,
/// `4 sqrt(p(1-p)) |a+b-c| / sqrt(n)`, widened by the deterministic offset
/// `T_0 / n`. When `a + b = c` only the offset remains.
pub fn growth_rate(params: &UrnParams, constants: &DerivedConstants, n: u64, t_n: u64) -> Verdict {
    let nf = n.max(1) as f64;
    let spread = (params.p * (1.0 - params.p)).sqrt() * ((params.a + params.b) as f64 - params.c as f64).abs();
    let tolerance = 4.0 * spread / nf.sqrt() + params.t0() as f64 / nf;
    Verdict::two_sided("growth.total_over_n", t_n as f64 / nf, constants.lambda, tolerance)
        .with_standard_error(spread / nf.sqrt())
        .with_low_power(n < 1000)
}

/// Plug-in value of `E[((n+1)/T_{n+1} dM_{n+1})^2 | F_n]` at a state: the
/// exact conditional second moment of the innovation scaled by
/// `((n+1) / E[T_{n+1} | F_n])^2`, with `E[T_{n+1} | F_n] = T_n + lambda`.
///
/// At `Z = 1/2` and `T_n = lambda n` this equals `sigma^2` exactly.
pub fn conditional_variance_plugin(params: &UrnParams, constants: &DerivedConstants, state: &UrnState) -> f64 {
    let second = conditional_checks_at::<f64>(params, state.y1, state.t).second_moment;
    let scale = (state.n + 1) as f64 / (state.t as f64 + constants.lambda);
    second * scale * scale
}

pub const CONDITIONAL_VARIANCE_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalVarianceTrack {
    /// `(n, plug-in value)` at each checkpoint.
    pub points: Vec<(u64, f64)>,
    pub verdict: Verdict,
}

/// Follows one path and evaluates [`conditional_variance_plugin`] at the
/// checkpoints; the verdict compares the last value with `sigma^2`.
pub fn conditional_variance_track<R: rand::Rng + ?Sized>(
    params: &UrnParams,
    constants: &DerivedConstants,
    rng: &mut R,
    checkpoints: &[u64],
) -> Result<ConditionalVarianceTrack> {
    let horizon = checkpoints.last().copied().unwrap_or(0);
    validate_checkpoints(checkpoints, horizon)?;
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut wanted = checkpoints.iter().copied().peekable();
    let mut visit = |s: &UrnState| {
        if wanted.peek() == Some(&s.n) {
            wanted.next();
            points.push((s.n, conditional_variance_plugin(params, constants, s)));
        }
    };
    visit(&UrnState::initial(params));
    run_path(params, rng, horizon, |_, next, _| visit(next));
    let terminal = points.last().map_or(f64::NAN, |p| p.1);
    let verdict = Verdict::two_sided(
        "growth.conditional_variance",
        terminal,
        constants.sigma_sq,
        CONDITIONAL_VARIANCE_TOLERANCE,
    )
    .with_low_power(horizon < 10_000);
    Ok(ConditionalVarianceTrack { points, verdict })
}
