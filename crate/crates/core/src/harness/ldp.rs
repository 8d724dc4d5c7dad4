use serde::{Deserialize, Serialize};

use super::Verdict;
use crate::dynamics::UrnState;
use crate::error::{Error, Result};
use crate::params::UrnParams;
use crate::replicate::map_replicates;
use crate::simulate::{run_path, validate_checkpoints};

/// Grid points with fewer exceedances are left out of the fit.
pub const MIN_EXCEEDANCES: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdpPoint {
    pub n: u64,
    pub exceedances: u64,
    pub probability: f64,
    /// Binomial standard error `sqrt(p(1-p)/R)`.
    pub std_error: f64,
    pub usable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdpReport {
    pub epsilon: f64,
    pub replicates: u64,
    pub points: Vec<LdpPoint>,
    /// Least-squares slope of `ln P` against `n` over usable points.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub verdicts: Vec<Verdict>,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Estimates `P(|Z_n - 1/2| > epsilon)` on each grid point and fits the decay
/// of its logarithm in `n`.
///
/// Every replicate follows one path through the whole grid, so the estimates
/// at different `n` share their draws. For `epsilon >= 1/2` the event is
/// impossible and the report holds zero probabilities without simulating.
pub fn ldp_decay(params: &UrnParams, epsilon: f64, n_grid: &[u64], replicates: u64, master_seed: u64) -> Result<LdpReport> {
    if !(epsilon > 0.0) {
        return Err(Error::OutOfRange { field: "epsilon", reason: format!("must be positive, got {epsilon}") });
    }
    if n_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    validate_checkpoints(n_grid, u64::MAX)?;
    if replicates < 2 {
        return Err(Error::InvalidSamples(format!("need at least 2 replicates, got {replicates}")));
    }
    let r = replicates as f64;

    if epsilon >= 0.5 {
        let points = n_grid
            .iter()
            .map(|&n| LdpPoint { n, exceedances: 0, probability: 0.0, std_error: 0.0, usable: false })
            .collect();
        let verdicts = vec![Verdict::no_violations("ldp.impossible_event", 0)];
        return Ok(LdpReport { epsilon, replicates, points, slope: None, intercept: None, verdicts });
    }

    let horizon = *n_grid.last().unwrap();
    let hits: Vec<Vec<bool>> = map_replicates(master_seed, replicates, |_, rng| {
        let mut row = Vec::with_capacity(n_grid.len());
        let mut wanted = n_grid.iter().copied().peekable();
        if wanted.peek() == Some(&0) {
            wanted.next();
            row.push((UrnState::initial(params).z - 0.5).abs() > epsilon);
        }
        run_path(params, rng, horizon, |_, next, _| {
            if wanted.peek() == Some(&next.n) {
                wanted.next();
                row.push((next.z - 0.5).abs() > epsilon);
            }
        });
        row
    });

    let points: Vec<LdpPoint> = n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let exceedances = hits.iter().filter(|row| row[i]).count() as u64;
            let probability = exceedances as f64 / r;
            LdpPoint {
                n,
                exceedances,
                probability,
                std_error: (probability * (1.0 - probability) / r).sqrt(),
                usable: exceedances >= MIN_EXCEEDANCES,
            }
        })
        .collect();

    let usable: Vec<&LdpPoint> = points.iter().filter(|p| p.usable).collect();
    if usable.len() < 2 {
        return Err(Error::InsufficientExceedances { min: MIN_EXCEEDANCES });
    }
    let xs: Vec<f64> = usable.iter().map(|p| p.n as f64).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.probability.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);

    let slope_verdict = Verdict::new("ldp.slope", super::Sense::LessThan, slope, 0.0, 0.0);

    // largest rise between consecutive grid points, in units of the combined SE
    let worst_rise = points
        .windows(2)
        .map(|w| {
            let se = (w[0].std_error.powi(2) + w[1].std_error.powi(2)).sqrt();
            let rise = w[1].probability - w[0].probability;
            if rise <= 0.0 {
                0.0
            } else if se > 0.0 {
                rise / se
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max);
    let monotone = Verdict::at_most("ldp.non_increasing", worst_rise, 2.0);

    // self-consistency: ln P(n) <= ln 2 + slope * n at every usable point
    let worst_excess = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (std::f64::consts::LN_2 + slope * x))
        .fold(f64::NEG_INFINITY, f64::max);
    let consistent = Verdict::at_most("ldp.self_consistent", worst_excess, 0.0);

    Ok(LdpReport {
        epsilon,
        replicates,
        points,
        slope: Some(slope),
        intercept: Some(intercept),
        verdicts: vec![slope_verdict, monotone, consistent],
    })
}
