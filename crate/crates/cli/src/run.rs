use std::time::Instant;

use serde_json::json;
use thiserror::Error;
use urn_core::exact::{exact_distribution, Rational};
use urn_core::harness::{self, linspace, SampleSet, Verdict};
use urn_core::recursions::{cf_recursion, cf_taylor_bound_check, second_moment_recursion, CfRecursionSpec};
use urn_core::{derive_seed, derived_constants, exact_constants, replicate_rng, simulate, DerivedConstants, Error};

use crate::config::{ConfigError, Experiment, ExperimentConfig};
use crate::report::{Execution, ExperimentReport};

pub const EXIT_VERDICT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

/// Tolerance for the second-moment consistency check.
pub const RECURSION_TOLERANCE: f64 = 1e-3;
/// Tolerance for `sup |beta_N - Gaussian|`.
pub const CF_RECURSION_TOLERANCE: f64 = 0.02;
pub const TAYLOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Precondition(Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange { .. } | Error::InvalidCheckpoints(_) | Error::EmptyGrid | Error::CapExceeded { .. } => {
                RunError::Config(ConfigError::Validation(e))
            }
            other => RunError::Precondition(other),
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io { .. } => EXIT_CONFIG,
            RunError::Precondition(_) => EXIT_PRECONDITION,
        }
    }
}

pub struct RunOutcome {
    pub report: ExperimentReport,
    pub samples: Option<SampleSet>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed {
            0
        } else {
            EXIT_VERDICT_FAIL
        }
    }
}

/// `1, 2, 5, 10, 20, 50, ...` restricted to `[lo, hi]`, with `hi` appended.
pub fn log_grid(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut decade = 1u64;
    'outer: loop {
        for m in [1, 2, 5] {
            let Some(v) = decade.checked_mul(m) else { break 'outer };
            if v > hi {
                break 'outer;
            }
            if v >= lo {
                out.push(v);
            }
        }
        match decade.checked_mul(10) {
            Some(d) => decade = d,
            None => break,
        }
    }
    if hi >= lo && out.last() != Some(&hi) {
        out.push(hi);
    }
    out
}

/// Powers of ten in `[lo, hi]`, with `hi` appended.
pub fn decade_grid(lo: u64, hi: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(1u64), |d| d.checked_mul(10))
        .take_while(|&d| d <= hi)
        .filter(|&d| d >= lo)
        .collect();
    if hi >= lo && out.last() != Some(&hi) {
        out.push(hi);
    }
    out
}

struct Parts {
    constants: Option<DerivedConstants>,
    verdicts: Vec<Verdict>,
    summary: serde_json::Value,
    samples: Option<SampleSet>,
}

fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report parts serialize")
}

fn to_f64(q: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

fn clt_samples(config: &ExperimentConfig) -> Result<SampleSet, Error> {
    harness::centered_scaled_samples(&config.params, config.horizon, config.replicates, config.master_seed)
}

fn dispatch(config: &ExperimentConfig) -> Result<Parts, Error> {
    let params = &config.params;
    let seed = config.master_seed;
    let parts = match config.experiment {
        Experiment::Constants => {
            let k = derived_constants(params)?;
            let exact = exact_constants(params)?;
            let text = |q: &Rational| q.to_string();
            let summary = json!({
                "exact": {
                    "lambda": text(&exact.lambda),
                    "gamma": text(&exact.gamma),
                    "sigma_sq": text(&exact.sigma_sq),
                    "limit_variance": exact.limit_variance.as_ref().map(text),
                    "alpha": text(&exact.alpha),
                }
            });
            Parts { constants: Some(k), verdicts: vec![], summary, samples: None }
        }
        Experiment::Simulate => {
            let k = derived_constants(params)?;
            let steps = match &config.n_grid {
                Some(g) => g.clone(),
                None => log_grid(1, config.horizon),
            };
            let mut steps_with_end = steps.clone();
            if steps_with_end.last() != Some(&config.horizon) {
                steps_with_end.push(config.horizon);
            }
            let trajectory = simulate(params, derive_seed(seed, 0), config.horizon, &steps_with_end)?;
            let end = trajectory.checkpoints.last().copied().expect("horizon is a checkpoint");
            let growth = harness::growth_rate(params, &k, end.n, end.t);
            let mut rng = replicate_rng(seed, 0);
            let track = harness::conditional_variance_track(params, &k, &mut rng, &steps_with_end)?;
            let summary = json!({ "trajectory": trajectory, "conditional_variance": track.points });
            Parts { constants: Some(k), verdicts: vec![growth, track.verdict], summary, samples: None }
        }
        Experiment::Clt => {
            let k = derived_constants(params)?;
            let samples = clt_samples(config)?;
            let report = harness::clt_test(&samples, &k, &Default::default())?;
            let verdicts = report.verdicts().into_iter().cloned().collect();
            Parts { constants: Some(k), verdicts, summary: json!({ "summary": report.summary }), samples: Some(samples) }
        }
        Experiment::Cf => {
            let k = derived_constants(params)?;
            if !k.clt_ok {
                return Err(Error::CltConditionViolated { two_gamma_minus_one: k.excess() });
            }
            let samples = clt_samples(config)?;
            let gap = harness::cf_gap(&samples, &k, &config.t_grid(), harness::DEFAULT_CF_GAP_TOLERANCE)?;
            let verdicts = vec![gap.verdict.clone()];
            Parts { constants: Some(k), verdicts, summary: to_value(&gap), samples: Some(samples) }
        }
        Experiment::Ldp => {
            let epsilon = config.epsilon.expect("validated");
            let grid = config.n_grid.as_deref().expect("validated");
            let report = harness::ldp_decay(params, epsilon, grid, config.replicates, seed)?;
            Parts {
                constants: derived_constants(params).ok(),
                verdicts: report.verdicts.clone(),
                summary: to_value(&report),
                samples: None,
            }
        }
        Experiment::Lil => {
            let k = derived_constants(params)?;
            let grid = match &config.n_grid {
                Some(g) => g.clone(),
                None => log_grid(harness::MIN_LIL_CHECKPOINT, config.horizon.saturating_sub(1)),
            };
            let report = harness::lil_envelope(params, &k, config.replicates, seed, &grid)?;
            let verdicts = report.verdicts().into_iter().cloned().collect();
            Parts { constants: Some(k), verdicts, summary: to_value(&report), samples: None }
        }
        Experiment::Couple => {
            let k = derived_constants(params)?;
            let grid = match &config.n_grid {
                Some(g) => g.clone(),
                None => decade_grid(10, config.horizon),
            };
            let report = harness::coupling_l1(params, &k, config.replicates, seed, &grid)?;
            let verdicts = report.verdicts().into_iter().cloned().collect();
            Parts { constants: Some(k), verdicts, summary: to_value(&report), samples: None }
        }
        Experiment::Oracle => {
            let cmp = harness::oracle_vs_monte_carlo(params, config.horizon, config.replicates, seed)?;
            let law: Vec<(f64, f64)> = exact_distribution::<Rational>(params, config.horizon)?
                .proportion_law()
                .into_iter()
                .map(|(z, m)| (to_f64(&z), to_f64(&m)))
                .collect();
            let verdicts = cmp.verdicts().into_iter().cloned().collect();
            let summary = json!({ "comparison": cmp, "proportion_law": law });
            Parts { constants: derived_constants(params).ok(), verdicts, summary, samples: None }
        }
        Experiment::Recursion => {
            let k = derived_constants(params)?;
            let limit = k.limit_variance.ok_or(Error::CltConditionViolated { two_gamma_minus_one: k.excess() })?;
            let n_max = config.horizon.max(2);
            let run = second_moment_recursion(k.gamma - 0.5, k.sigma_sq, k.sigma_sq, n_max)?;
            let extrapolated = run.extrapolated_limit(k.excess()).unwrap_or(run.final_value);
            let consistency =
                Verdict::two_sided("recursion.second_moment_limit", extrapolated, limit, RECURSION_TOLERANCE);

            let cf = cf_recursion(&CfRecursionSpec {
                gamma: k.gamma,
                sigma_sq: k.sigma_sq,
                t_grid: config.t_grid(),
                n_steps: config.horizon.max(1),
            })?;
            let at_zero = urn_core::recursions::beta(k.gamma, k.sigma_sq, 0.0, config.horizon.max(1)).0;
            let beta_zero = Verdict::two_sided("recursion.beta_at_zero", at_zero, 1.0, 0.0);
            let cf_gap = Verdict::at_most("recursion.beta_gap_to_gaussian", cf.sup_gap, CF_RECURSION_TOLERANCE);

            let y_grid = linspace(-10.0, 10.0, 2001);
            let worst = (0..=4).map(|n| cf_taylor_bound_check(&y_grid, n)).collect::<Result<Vec<_>, _>>()?;
            let taylor = Verdict::at_most("recursion.taylor_bound", worst.iter().copied().fold(0.0, f64::max), TAYLOR_TOLERANCE);

            let summary = json!({
                "second_moment": {
                    "raw_final": run.final_value,
                    "raw_residual": run.final_residual,
                    "extrapolated": extrapolated,
                    "checkpoints": run.checkpoints,
                },
                "cf_recursion": cf,
                "taylor_worst_excess": worst,
            });
            Parts { constants: Some(k), verdicts: vec![consistency, beta_zero, cf_gap, taylor], summary, samples: None }
        }
    };
    Ok(parts)
}

fn warnings(config: &ExperimentConfig) -> Vec<String> {
    let mut w = Vec::new();
    if config.params.degenerate_start() {
        w.push("initial composition has a single color; the first draws are forced".to_string());
    }
    if config.experiment == Experiment::Lil {
        w.push("LIL verdict is a weak envelope; the limsup is not reached at desk scale".to_string());
    }
    w
}

/// Runs the configured experiment on a pool of `config.workers` threads.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome, RunError> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .expect("thread pool builds");
    let parts = pool.install(|| dispatch(config))?;
    let mut report = ExperimentReport::new(config, parts.constants, parts.verdicts, warnings(config), parts.summary);
    report.execution = Some(Execution {
        workers: config.workers,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        output_path: config.output_path.clone(),
        samples_path: config.samples_path.clone(),
    });
    Ok(RunOutcome { report, samples: parts.samples })
}
