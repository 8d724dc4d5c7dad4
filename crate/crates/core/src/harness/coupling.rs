use serde::{Deserialize, Serialize};

use super::stats::Summary;
use super::Verdict;
use crate::constants::DerivedConstants;
use crate::error::{Error, Result};
use crate::params::UrnParams;
use crate::replicate::map_replicates;
use crate::simulate::{run_path, validate_checkpoints};

/// Checkpoints below this step are excluded from the trend verdict.
pub const BURN_IN: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingState {
    /// `X_n = sqrt(n) (Z_n - 1/2)`
    pub x: f64,
    pub d: f64,
    /// `x - d`
    pub delta: f64,
}

impl CouplingState {
    fn new(x: f64, d: f64) -> Self {
        CouplingState { x, d, delta: x - d }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingPoint {
    pub n: u64,
    pub mean_abs_delta: f64,
    pub se_abs_delta: f64,
    pub mean_abs_d: f64,
    pub se_abs_d: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingReport {
    pub replicates: u64,
    pub points: Vec<CouplingPoint>,
    pub v_violations: u64,
    pub max_abs_v: f64,
    pub trend: Verdict,
    pub v_bound: Verdict,
    pub d_bound: Verdict,
}

impl CouplingReport {
    pub fn verdicts(&self) -> [&Verdict; 3] {
        [&self.trend, &self.v_bound, &self.d_bound]
    }
}

struct PathRecord {
    states: Vec<CouplingState>,
    v_violations: u64,
    max_abs_v: f64,
}

/// Runs `X_n` and the comparison process
/// `D_{n+1} = (1 - (Gamma - 1/2)/(n+1)) D_n + (V_{n+1} - E[V_{n+1} | F_n]) / sqrt(n+1)`
/// on the same draws, with `V_{n+1} = (n+1) dM_{n+1} / T_{n+1}` and the
/// conditional mean from the closed form
/// `(n+1) bp(1-p)(1-2Z)(c-a-b) / ((T+a+b)(T+c))`. Both start at zero.
fn coupled_path<R: rand::Rng + ?Sized>(
    params: &UrnParams,
    constants: &DerivedConstants,
    rng: &mut R,
    checkpoints: &[u64],
) -> PathRecord {
    let horizon = checkpoints.last().copied().unwrap_or(0);
    let (a, b, c) = (params.a as f64, params.b as f64, params.c as f64);
    let k = b * params.p * (1.0 - params.p) * (c - a - b);
    let shift = constants.gamma - 0.5;
    let v_cap = constants.cv_bound.sqrt() * (1.0 + 1e-12);

    let mut d = 0.0;
    let mut states = Vec::with_capacity(checkpoints.len());
    let mut wanted = checkpoints.iter().copied().peekable();
    let mut v_violations = 0;
    let mut max_abs_v: f64 = 0.0;
    if wanted.peek() == Some(&0) {
        wanted.next();
        states.push(CouplingState::new(0.0, 0.0));
    }
    run_path(params, rng, horizon, |before, next, delta| {
        let m = next.n as f64;
        let t = before.t as f64;
        let v = m * delta.dm / next.t as f64;
        let ev = m * k * (1.0 - 2.0 * before.z) / ((t + a + b) * (t + c));
        max_abs_v = max_abs_v.max(v.abs());
        if v.abs() > v_cap {
            v_violations += 1;
        }
        d = (1.0 - shift / m) * d + (v - ev) / m.sqrt();
        if wanted.peek() == Some(&next.n) {
            wanted.next();
            states.push(CouplingState::new(next.centered_scaled(), d));
        }
    });
    PathRecord { states, v_violations, max_abs_v }
}

/// Estimates `E|Delta_n|` and `E|D_n|` at the checkpoints over `replicates`
/// coupled paths.
pub fn coupling_l1(
    params: &UrnParams,
    constants: &DerivedConstants,
    replicates: u64,
    master_seed: u64,
    checkpoints: &[u64],
) -> Result<CouplingReport> {
    let d_bound = match constants.coupling_d_bound() {
        Some(v) => v,
        None => return Err(Error::CltConditionViolated { two_gamma_minus_one: constants.excess() }),
    };
    if checkpoints.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if replicates < 2 {
        return Err(Error::InvalidSamples(format!("need at least 2 replicates, got {replicates}")));
    }
    validate_checkpoints(checkpoints, u64::MAX)?;

    let paths = map_replicates(master_seed, replicates, |_, rng| coupled_path(params, constants, rng, checkpoints));
    let v_violations = paths.iter().map(|p| p.v_violations).sum();
    let max_abs_v = paths.iter().map(|p| p.max_abs_v).fold(0.0, f64::max);

    let points: Vec<CouplingPoint> = checkpoints
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let deltas: Vec<f64> = paths.iter().map(|p| p.states[i].delta.abs()).collect();
            let ds: Vec<f64> = paths.iter().map(|p| p.states[i].d.abs()).collect();
            let (sd, sm) = (Summary::of(&deltas), Summary::of(&ds));
            CouplingPoint {
                n,
                mean_abs_delta: sd.mean,
                se_abs_delta: sd.std_error_mean(),
                mean_abs_d: sm.mean,
                se_abs_d: sm.std_error_mean(),
            }
        })
        .collect();

    let trended: Vec<&CouplingPoint> = points.iter().filter(|p| p.n >= BURN_IN).collect();
    let trend = if trended.len() < 2 {
        Verdict::at_most("coupling.delta_non_increasing", 0.0, 0.0).with_low_power(true)
    } else {
        let max_rise = trended
            .windows(2)
            .map(|w| w[1].mean_abs_delta - w[0].mean_abs_delta)
            .fold(f64::NEG_INFINITY, f64::max);
        Verdict::at_most("coupling.delta_non_increasing", max_rise, 0.0)
    };

    let v_bound = Verdict::no_violations("coupling.v_bound", v_violations);

    let last = points[points.len() - 1];
    let d_bound = Verdict::new(
        "coupling.d_bound",
        super::Sense::AtMost,
        last.mean_abs_d,
        d_bound,
        3.0 * last.se_abs_d,
    )
    .with_standard_error(last.se_abs_d);

    Ok(CouplingReport { replicates, points, v_violations, max_abs_v, trend, v_bound, d_bound })
}
