//! Seeded trajectory simulation with sparse checkpoints.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{drift_unchecked, sample_outcome, step, StepDelta, UrnState};
use crate::error::{Error, Result};
use crate::params::UrnParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub t: u64,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: UrnParams,
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
}

pub fn validate_checkpoints(steps: &[u64], horizon: u64) -> Result<()> {
    if let Some(w) = steps.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::InvalidCheckpoints(format!(
            "steps must be strictly increasing, found {} then {}",
            w[0], w[1]
        )));
    }
    if let Some(&last) = steps.last() {
        if last > horizon {
            return Err(Error::InvalidCheckpoints(format!(
                "checkpoint {last} lies beyond horizon {horizon}"
            )));
        }
    }
    Ok(())
}

/// Advances the urn `horizon` steps from its initial composition, calling
/// `observe(before, after, delta)` after every step. Returns the final state.
#[inline]
pub fn run_path<R, F>(params: &UrnParams, rng: &mut R, horizon: u64, mut observe: F) -> UrnState
where
    R: Rng + ?Sized,
    F: FnMut(&UrnState, &UrnState, &StepDelta),
{
    let mut state = UrnState::initial(params);
    for _ in 0..horizon {
        let outcome = sample_outcome(&state, params, rng);
        let (next, delta) = step(&state, outcome, params);
        observe(&state, &next, &delta);
        state = next;
    }
    state
}

/// Simulates one path seeded with `seed` and records `(n, t, z)` at each
/// requested step.
pub fn simulate(params: &UrnParams, seed: u64, horizon: u64, checkpoint_steps: &[u64]) -> Result<Trajectory> {
    validate_checkpoints(checkpoint_steps, horizon)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wanted = checkpoint_steps.iter().copied().peekable();
    let mut checkpoints = Vec::with_capacity(checkpoint_steps.len());
    let mut record = |s: &UrnState| {
        if wanted.peek() == Some(&s.n) {
            wanted.next();
            checkpoints.push(Checkpoint { n: s.n, t: s.t, z: s.z });
        }
    };
    record(&UrnState::initial(params));
    run_path(params, &mut rng, horizon, |_, next, _| record(next));
    Ok(Trajectory { params: *params, seed, checkpoints })
}

/// Counts violations of the pathwise guarantees on observed steps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PathwiseAudit {
    pub steps: u64,
    /// `n * min{a+b, c} <= T_n <= T_0 + n * max{a+b, c}`.
    pub total_sandwich: u64,
    /// `T_{n+1} - T_n` in `{a+b, c}` and `dY1` in `{a, b, c, 0}`.
    pub increment_support: u64,
    /// `|f(Z_n)| <= bp`.
    pub drift_bound: u64,
    /// `|dM| <= 2a + 3b + 2c`.
    pub innovation_bound: u64,
    /// `Z_{n+1} - Z_n = (f(Z_n) + dM) / T_{n+1}` to 1e-12.
    pub proportion_identity: u64,
    pub state_consistency: u64,
    pub max_identity_error: f64,
}

pub const IDENTITY_TOLERANCE: f64 = 1e-12;

impl PathwiseAudit {
    pub fn observe(&mut self, params: &UrnParams, before: &UrnState, after: &StepDelta, next: &UrnState) {
        self.steps += 1;
        let (a, b, c) = (params.a, params.b, params.c);

        let n = next.n;
        if next.t < n * params.min_increment() || next.t > params.t0() + n * params.max_increment() {
            self.total_sandwich += 1;
        }

        let dt_ok = after.dt == a + b || after.dt == c;
        let dy_ok = [a, b, c, 0].contains(&after.dy1);
        if !dt_ok || !dy_ok || next.t - before.t != after.dt || next.y1 - before.y1 != after.dy1 {
            self.increment_support += 1;
        }

        let bp = b as f64 * params.p;
        if drift_unchecked(before.z, params).abs() > bp {
            self.drift_bound += 1;
        }

        if after.dm.abs() > (2 * a + 3 * b + 2 * c) as f64 {
            self.innovation_bound += 1;
        }

        let lhs = next.z - before.z;
        let rhs = (after.drift + after.dm) / next.t as f64;
        let err = (lhs - rhs).abs();
        self.max_identity_error = self.max_identity_error.max(err);
        if err > IDENTITY_TOLERANCE {
            self.proportion_identity += 1;
        }

        let z_err = (next.z * next.t as f64 - next.y1 as f64).abs();
        if next.t != next.y1 + next.y2 || z_err > 1e-12 * next.t as f64 {
            self.state_consistency += 1;
        }
    }

    pub fn violations(&self) -> u64 {
        self.total_sandwich
            + self.increment_support
            + self.drift_bound
            + self.innovation_bound
            + self.proportion_identity
            + self.state_consistency
    }

    pub fn merge(&mut self, other: &PathwiseAudit) {
        self.steps += other.steps;
        self.total_sandwich += other.total_sandwich;
        self.increment_support += other.increment_support;
        self.drift_bound += other.drift_bound;
        self.innovation_bound += other.innovation_bound;
        self.proportion_identity += other.proportion_identity;
        self.state_consistency += other.state_consistency;
        self.max_identity_error = self.max_identity_error.max(other.max_identity_error);
    }
}

/// Simulates one path and audits every step.
pub fn audit_path<R: Rng + ?Sized>(params: &UrnParams, rng: &mut R, horizon: u64) -> PathwiseAudit {
    let mut audit = PathwiseAudit::default();
    run_path(params, rng, horizon, |before, next, delta| audit.observe(params, before, delta, next));
    audit
}
