//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function takes plain numbers and returns a JSON string. The
//! `*_report` functions hold the logic and are what the native tests call.

use serde::Serialize;
use urn_core::harness::{centered_scaled_samples, linspace, Summary};
use urn_core::recursions::{cf_recursion, CfRecursionSpec};
use urn_core::{derived_constants, simulate, DerivedConstants, UrnParams};
use wasm_bindgen::prelude::*;

/// Upper limits that keep a single call responsive in a browser tab.
pub const MAX_HORIZON: u64 = 2_000_000;
pub const MAX_REPLICATE_STEPS: u64 = 20_000_000;
pub const MAX_CF_STEPS: u64 = 10_000_000;
const PATH_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inputs {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub p: f64,
}

impl Inputs {
    fn params(&self) -> Result<UrnParams, String> {
        UrnParams::new(self.a.into(), self.b.into(), self.c.into(), self.p, 1, 1).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct PathReport {
    pub constants: DerivedConstants,
    pub n: Vec<u64>,
    pub z: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct HistogramReport {
    pub constants: DerivedConstants,
    pub n: u64,
    pub replicates: u64,
    pub mean: f64,
    pub variance: f64,
    pub edges: Vec<f64>,
    pub density: Vec<f64>,
    pub gaussian: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct CfReport {
    pub constants: DerivedConstants,
    pub n_steps: u64,
    pub t: Vec<f64>,
    pub beta: Vec<f64>,
    pub gaussian: Vec<f64>,
    pub sup_gap: f64,
}

fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut steps: Vec<u64> = (1..=PATH_POINTS)
        .map(|i| ((horizon as f64).powf(i as f64 / PATH_POINTS as f64)).round() as u64)
        .map(|n| n.clamp(1, horizon))
        .collect();
    steps.dedup();
    steps
}

pub fn path_report(inputs: Inputs, horizon: u64, seed: u64) -> Result<PathReport, String> {
    if horizon == 0 || horizon > MAX_HORIZON {
        return Err(format!("horizon must be between 1 and {MAX_HORIZON}"));
    }
    let params = inputs.params()?;
    let constants = derived_constants(&params).map_err(|e| e.to_string())?;
    let traj = simulate(&params, seed, horizon, &checkpoints(horizon)).map_err(|e| e.to_string())?;
    Ok(PathReport {
        constants,
        n: traj.checkpoints.iter().map(|c| c.n).collect(),
        z: traj.checkpoints.iter().map(|c| c.z).collect(),
    })
}

pub fn histogram_report(inputs: Inputs, n: u64, replicates: u64, bins: usize, seed: u64) -> Result<HistogramReport, String> {
    if n == 0 || replicates < 2 || n.saturating_mul(replicates) > MAX_REPLICATE_STEPS {
        return Err(format!("need n >= 1, replicates >= 2 and n * replicates <= {MAX_REPLICATE_STEPS}"));
    }
    if !(2..=200).contains(&bins) {
        return Err("bins must be between 2 and 200".into());
    }
    let params = inputs.params()?;
    let constants = derived_constants(&params).map_err(|e| e.to_string())?;
    let Some(limit) = constants.limit_variance else {
        return Err(format!("no Gaussian limit: Gamma = {:.4} is not above 1/2", constants.gamma));
    };
    let samples = centered_scaled_samples(&params, n, replicates, seed).map_err(|e| e.to_string())?;
    let summary = Summary::of(&samples.values);
    let half = 4.0 * limit.sqrt();
    let edges = linspace(-half, half, bins + 1);
    let width = edges[1] - edges[0];
    let mut counts = vec![0u64; bins];
    for v in &samples.values {
        let k = ((v + half) / width).floor();
        if k >= 0.0 && (k as usize) < bins {
            counts[k as usize] += 1;
        }
    }
    let total = samples.values.len() as f64;
    let gaussian = edges
        .windows(2)
        .map(|w| {
            let x = 0.5 * (w[0] + w[1]);
            (-x * x / (2.0 * limit)).exp() / (2.0 * std::f64::consts::PI * limit).sqrt()
        })
        .collect();
    Ok(HistogramReport {
        constants,
        n,
        replicates,
        mean: summary.mean,
        variance: summary.variance,
        density: counts.iter().map(|&k| k as f64 / (total * width)).collect(),
        edges,
        gaussian,
    })
}

pub fn cf_report(inputs: Inputs, n_steps: u64, t_max: f64, t_points: usize) -> Result<CfReport, String> {
    if n_steps == 0 || n_steps > MAX_CF_STEPS {
        return Err(format!("steps must be between 1 and {MAX_CF_STEPS}"));
    }
    if !(t_max > 0.0 && t_max <= 20.0) || !(2..=500).contains(&t_points) {
        return Err("need 0 < t_max <= 20 and 2 to 500 grid points".into());
    }
    let params = inputs.params()?;
    let constants = derived_constants(&params).map_err(|e| e.to_string())?;
    if !constants.clt_ok {
        return Err(format!("no Gaussian limit: Gamma = {:.4} is not above 1/2", constants.gamma));
    }
    let spec = CfRecursionSpec {
        gamma: constants.gamma,
        sigma_sq: constants.sigma_sq,
        t_grid: linspace(-t_max, t_max, t_points),
        n_steps,
    };
    let res = cf_recursion(&spec).map_err(|e| e.to_string())?;
    Ok(CfReport {
        constants,
        n_steps,
        t: res.points.iter().map(|p| p.t).collect(),
        beta: res.points.iter().map(|p| p.beta).collect(),
        gaussian: res.points.iter().map(|p| p.gaussian).collect(),
        sup_gap: res.sup_gap,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string())).map_err(|e| JsValue::from_str(&e))
}

/// One trajectory of the proportion `Z_n`, sampled on a log-spaced grid.
#[wasm_bindgen]
pub fn simulate_path(a: u32, b: u32, c: u32, p: f64, horizon: u32, seed: u32) -> Result<String, JsValue> {
    to_js(path_report(Inputs { a, b, c, p }, horizon.into(), seed.into()))
}

/// Histogram of `sqrt(n) (Z_n - 1/2)` over independent replicates, with the
/// limiting Gaussian density at bin midpoints.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn clt_histogram(a: u32, b: u32, c: u32, p: f64, n: u32, replicates: u32, bins: u32, seed: u32) -> Result<String, JsValue> {
    to_js(histogram_report(Inputs { a, b, c, p }, n.into(), replicates.into(), bins as usize, seed.into()))
}

/// The deterministic product `beta_N(t)` next to the Gaussian characteristic
/// function.
#[wasm_bindgen]
pub fn cf_product(a: u32, b: u32, c: u32, p: f64, n_steps: u32, t_max: f64, t_points: u32) -> Result<String, JsValue> {
    to_js(cf_report(Inputs { a, b, c, p }, n_steps.into(), t_max, t_points as usize))
}
