use serde::{Deserialize, Serialize};

use super::Verdict;
use crate::constants::DerivedConstants;
use crate::error::{Error, Result};
use crate::params::UrnParams;
use crate::replicate::map_replicates;
use crate::simulate::{run_path, validate_checkpoints};

/// Smallest checkpoint with `ln ln n > 0` comfortably; `e^2 < 8`.
pub const MIN_LIL_CHECKPOINT: u64 = 8;

/// Width of the sanity band, in units of the limsup constant.
pub const ENVELOPE_FACTOR: f64 = 3.0;

/// `sqrt(n / (2 ln ln n)) (z - 1/2)`, where `z` is the proportion after step
/// `n + 1`.
pub fn lil_statistic(n: u64, z_next: f64) -> f64 {
    let nf = n as f64;
    (nf / (2.0 * nf.ln().ln())).sqrt() * (z_next - 0.5)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LilReport {
    pub paths: u64,
    pub checkpoints: Vec<u64>,
    /// Per path, the largest statistic over the checkpoints.
    pub path_maxima: Vec<f64>,
    pub max_statistic: f64,
    pub envelope: f64,
    pub below_envelope: Verdict,
    pub positive: Verdict,
    /// The band is a weak sanity check: the limsup itself needs far longer
    /// paths than a desk run provides.
    pub note: String,
}

impl LilReport {
    pub fn verdicts(&self) -> [&Verdict; 2] {
        [&self.below_envelope, &self.positive]
    }
}

/// Checks that the LIL statistic stays in `(0, ENVELOPE_FACTOR * lil_scale]`
/// when maximized over checkpoints and paths.
pub fn lil_envelope(
    params: &UrnParams,
    constants: &DerivedConstants,
    paths: u64,
    master_seed: u64,
    checkpoints: &[u64],
) -> Result<LilReport> {
    let scale = match (constants.lil_ok, constants.lil_scale) {
        (true, Some(s)) => s,
        _ => {
            let ratio = -constants.alpha - 1.0;
            return Err(Error::LilConditionViolated { ratio });
        }
    };
    if checkpoints.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(&n) = checkpoints.iter().find(|&&n| n < MIN_LIL_CHECKPOINT) {
        return Err(Error::InvalidCheckpoints(format!("checkpoint {n} is below {MIN_LIL_CHECKPOINT}")));
    }
    validate_checkpoints(checkpoints, u64::MAX)?;
    if paths == 0 {
        return Err(Error::InvalidSamples("need at least one path".into()));
    }

    let horizon = checkpoints.last().unwrap() + 1;
    let path_maxima = map_replicates(master_seed, paths, |_, rng| {
        let mut best = f64::NEG_INFINITY;
        let mut wanted = checkpoints.iter().copied().peekable();
        run_path(params, rng, horizon, |_, next, _| {
            if wanted.peek() == Some(&(next.n - 1)) {
                wanted.next();
                best = best.max(lil_statistic(next.n - 1, next.z));
            }
        });
        best
    });
    let max_statistic = path_maxima.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let envelope = ENVELOPE_FACTOR * scale;

    Ok(LilReport {
        paths,
        checkpoints: checkpoints.to_vec(),
        path_maxima,
        max_statistic,
        envelope,
        below_envelope: Verdict::at_most("lil.below_envelope", max_statistic, envelope),
        positive: Verdict::new("lil.positive", super::Sense::GreaterThan, max_statistic, 0.0, 0.0),
        note: "weak sanity band; the limsup is not reached at this horizon".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::derived_constants;
    use approx::assert_abs_diff_eq;

    fn lil_params() -> (UrnParams, DerivedConstants) {
        let params = UrnParams::new(1, 10, 1, 0.5, 1, 1).unwrap();
        (params, derived_constants(&params).unwrap())
    }

    #[test]
    fn statistic_formula() {
        let n = 1000u64;
        let expected = (1000.0 / (2.0 * (1000f64).ln().ln())).sqrt() * 0.01;
        assert_abs_diff_eq!(lil_statistic(n, 0.51), expected, epsilon = 1e-15);
        assert_eq!(lil_statistic(n, 0.5), 0.0);
    }

    #[test]
    fn envelope_constant() {
        let (_, k) = lil_params();
        // sigma^2 = 41/144, 2 alpha + 1 = 2/3
        assert_abs_diff_eq!(k.lil_scale.unwrap(), (41.0f64 / 144.0 * 1.5).sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn rejects_wrong_regime() {
        let params = UrnParams::new(1, 3, 2, 0.25, 1, 1).unwrap();
        let k = derived_constants(&params).unwrap();
        assert!(matches!(lil_envelope(&params, &k, 4, 0, &[10]), Err(Error::LilConditionViolated { .. })));
    }

    #[test]
    fn rejects_small_checkpoint() {
        let (params, k) = lil_params();
        assert!(matches!(lil_envelope(&params, &k, 4, 0, &[3, 100]), Err(Error::InvalidCheckpoints(_))));
        assert!(lil_envelope(&params, &k, 4, 0, &[8, 100]).is_ok());
    }

    #[test]
    fn short_run() {
        let (params, k) = lil_params();
        let report = lil_envelope(&params, &k, 20, 5, &[10, 100, 1000]).unwrap();
        assert_eq!(report.path_maxima.len(), 20);
        assert!(report.below_envelope.pass);
    }
}
