use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SampleSet, Verdict};
use crate::constants::DerivedConstants;
use crate::error::{Error, Result};
use crate::recursions::beta;

pub const DEFAULT_CF_GAP_TOLERANCE: f64 = 0.05;

/// `(1/R) sum_r exp(i t x_r)`, summed in sample order.
pub fn empirical_cf(values: &[f64], t: f64) -> Complex64 {
    let sum = values.iter().fold(Complex64::new(0.0, 0.0), |acc, &x| acc + Complex64::cis(t * x));
    sum / values.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CfGapPoint {
    pub t: f64,
    pub empirical_re: f64,
    pub empirical_im: f64,
    pub beta: f64,
    pub gaussian: f64,
}

impl CfGapPoint {
    pub fn empirical(&self) -> Complex64 {
        Complex64::new(self.empirical_re, self.empirical_im)
    }

    pub fn gap_to_beta(&self) -> f64 {
        (self.empirical() - self.beta).norm()
    }

    pub fn gap_to_gaussian(&self) -> f64 {
        (self.empirical() - self.gaussian).norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfGapReport {
    pub n: u64,
    pub points: Vec<CfGapPoint>,
    pub sup_gap_beta: f64,
    pub sup_gap_gaussian: f64,
    pub verdict: Verdict,
}

/// Compares the empirical characteristic function of the sample with
/// `beta_N` at `N = samples.n` and with the Gaussian limit `exp(-t^2 v / 2)`.
/// The verdict is on the Gaussian gap.
pub fn cf_gap(samples: &SampleSet, constants: &DerivedConstants, t_grid: &[f64], tolerance: f64) -> Result<CfGapReport> {
    if t_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let limit = match (constants.clt_ok, constants.limit_variance) {
        (true, Some(v)) => v,
        _ => return Err(Error::CltConditionViolated { two_gamma_minus_one: constants.excess() }),
    };
    let n_steps = samples.n.max(1);
    let points: Vec<CfGapPoint> = t_grid
        .iter()
        .map(|&t| {
            let phi = empirical_cf(&samples.values, t);
            CfGapPoint {
                t,
                empirical_re: phi.re,
                empirical_im: phi.im,
                beta: beta(constants.gamma, constants.sigma_sq, t, n_steps).0,
                gaussian: (-0.5 * t * t * limit).exp(),
            }
        })
        .collect();
    let sup_gap_beta = points.iter().map(CfGapPoint::gap_to_beta).fold(0.0, f64::max);
    let sup_gap_gaussian = points.iter().map(CfGapPoint::gap_to_gaussian).fold(0.0, f64::max);
    // Monte Carlo error of the empirical CF is at most 1/sqrt(R) per point
    let verdict = Verdict::at_most("cf.gap_to_gaussian", sup_gap_gaussian, tolerance)
        .with_standard_error(1.0 / (samples.replicates() as f64).sqrt());
    Ok(CfGapReport { n: samples.n, points, sup_gap_beta, sup_gap_gaussian, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::derived_constants;
    use crate::harness::linspace;
    use crate::params::UrnParams;
    use approx::assert_abs_diff_eq;

    fn example() -> (UrnParams, DerivedConstants) {
        let params = UrnParams::new(1, 3, 2, 0.25, 1, 1).unwrap();
        (params, derived_constants(&params).unwrap())
    }

    #[test]
    fn cf_at_zero_is_one() {
        let (params, k) = example();
        let samples = SampleSet::new(params, 50, vec![0.3, -1.2, 2.0], 0).unwrap();
        let report = cf_gap(&samples, &k, &[0.0], 0.05).unwrap();
        let p = report.points[0];
        assert_eq!((p.empirical_re, p.empirical_im, p.beta, p.gaussian), (1.0, 0.0, 1.0, 1.0));
        assert_eq!(report.sup_gap_gaussian, 0.0);
    }

    #[test]
    fn symmetric_sample_has_real_cf() {
        let phi = empirical_cf(&[-0.7, 0.7, -2.0, 2.0], 1.3);
        assert_abs_diff_eq!(phi.im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(phi.re, ((1.3f64 * 0.7).cos() + (2.6f64).cos()) / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn empirical_cf_is_bounded_by_one() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin() * 3.0).collect();
        for t in linspace(-3.0, 3.0, 31) {
            assert!(empirical_cf(&xs, t).norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn gap_shrinks_with_more_replicates() {
        let (params, k) = example();
        let grid = linspace(-3.0, 3.0, 25);
        let small = super::super::centered_scaled_samples(&params, 100, 200, 5).unwrap();
        let large = super::super::centered_scaled_samples(&params, 100, 2000, 5).unwrap();
        let gs = cf_gap(&small, &k, &grid, 1.0).unwrap();
        let gl = cf_gap(&large, &k, &grid, 1.0).unwrap();
        assert!(gl.sup_gap_beta < gs.sup_gap_beta, "{} vs {}", gl.sup_gap_beta, gs.sup_gap_beta);
    }

    #[test]
    fn requires_gaussian_target() {
        let params = UrnParams::new(5, 1, 2, 0.5, 1, 1).unwrap();
        let k = derived_constants(&params).unwrap();
        let samples = SampleSet::new(params, 10, vec![0.0, 1.0], 0).unwrap();
        assert!(cf_gap(&samples, &k, &[1.0], 0.05).is_err());
        let (params, k) = example();
        let samples = SampleSet::new(params, 10, vec![0.0, 1.0], 0).unwrap();
        assert_eq!(cf_gap(&samples, &k, &[], 0.05), Err(Error::EmptyGrid));
    }
}
