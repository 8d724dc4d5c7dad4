use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::stats::Summary;
use super::{SampleSet, Verdict};
use crate::constants::DerivedConstants;
use crate::error::{Error, Result};
use crate::params::UrnParams;
use crate::replicate::map_replicates;
use crate::simulate::run_path;

/// Below this many replicates the CLT verdicts are marked low-power.
pub const MIN_POWERED_REPLICATES: usize = 1000;

/// Acceptance thresholds for the desk-scale CLT check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltTolerances {
    /// Bound on `|mean|`.
    pub mean: f64,
    /// Relative band around the limit variance.
    pub variance_rel: f64,
    /// Bound on the Kolmogorov-Smirnov distance.
    pub ks: f64,
}

impl Default for CltTolerances {
    fn default() -> Self {
        CltTolerances { mean: 0.02, variance_rel: 0.15, ks: 0.03 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub summary: Summary,
    pub mean: Verdict,
    pub variance: Verdict,
    pub ks: Verdict,
}

impl CltReport {
    pub fn verdicts(&self) -> [&Verdict; 3] {
        [&self.mean, &self.variance, &self.ks]
    }
}

/// One-sample Kolmogorov-Smirnov distance `sup_x |F_R(x) - F(x)|`.
pub fn ks_distance<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let r = sorted.len() as f64;
    sorted.iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / r - f;
        let below = f - i as f64 / r;
        acc.max(above).max(below)
    })
}

/// Simulates `replicates` independent paths to step `n` and collects
/// `sqrt(n) (Z_n - 1/2)` from each.
pub fn centered_scaled_samples(params: &UrnParams, n: u64, replicates: u64, master_seed: u64) -> Result<SampleSet> {
    let values = map_replicates(master_seed, replicates, |_, rng| run_path(params, rng, n, |_, _, _| {}).centered_scaled());
    SampleSet::new(*params, n, values, master_seed)
}

/// Compares the sample with `N(0, limit_variance)`: mean near zero, variance
/// within a relative band, and KS distance below a threshold. The KS distance
/// is descriptive; no p-value is computed.
pub fn clt_test(samples: &SampleSet, constants: &DerivedConstants, tol: &CltTolerances) -> Result<CltReport> {
    let limit = match (constants.clt_ok, constants.limit_variance) {
        (true, Some(v)) => v,
        _ => return Err(Error::CltConditionViolated { two_gamma_minus_one: constants.excess() }),
    };
    let summary = Summary::of(&samples.values);
    let low_power = samples.replicates() < MIN_POWERED_REPLICATES;

    let mean = Verdict::two_sided("clt.mean", summary.mean, 0.0, tol.mean)
        .with_standard_error(summary.std_error_mean())
        .with_low_power(low_power);
    let variance = Verdict::two_sided("clt.variance", summary.variance, limit, tol.variance_rel * limit)
        .with_standard_error(summary.std_error_variance())
        .with_low_power(low_power);
    let normal = Normal::new(0.0, limit.sqrt()).expect("positive limit variance");
    let ks = Verdict::at_most("clt.ks_distance", ks_distance(&samples.values, |x| normal.cdf(x)), tol.ks)
        .with_low_power(low_power);

    Ok(CltReport { summary, mean, variance, ks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::derived_constants;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn standard_normal() -> Normal {
        Normal::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn ks_single_point_at_median() {
        let n = standard_normal();
        assert_abs_diff_eq!(ks_distance(&[0.0], |x| n.cdf(x)), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn ks_matches_reference_values() {
        // reference values from scipy.stats.kstest
        let n = standard_normal();
        assert_abs_diff_eq!(ks_distance(&[-1.0, 0.2, 0.5, 1.5], |x| n.cdf(x)), 0.329259709439103, epsilon = 1e-12);
        let n = Normal::new(0.0, 0.8f64.sqrt()).unwrap();
        let xs = [2.2, -0.4, 0.05, -1.3, 0.9, 0.2];
        assert_abs_diff_eq!(ks_distance(&xs, |x| n.cdf(x)), 0.18895660816988485, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn ks_distance_in_unit_interval(xs in prop::collection::vec(-50.0f64..50.0, 1..200)) {
            let n = standard_normal();
            let d = ks_distance(&xs, |x| n.cdf(x));
            prop_assert!((0.0..=1.0).contains(&d));
            // never below the trivial bound 1/(2R)
            prop_assert!(d >= 0.5 / xs.len() as f64 - 1e-12);
        }
    }

    #[test]
    fn clt_condition_enforced() {
        let params = UrnParams::new(5, 1, 2, 0.5, 1, 1).unwrap();
        let k = derived_constants(&params).unwrap();
        let samples = SampleSet::new(params, 10, vec![0.0, 1.0], 0).unwrap();
        assert!(matches!(clt_test(&samples, &k, &CltTolerances::default()), Err(Error::CltConditionViolated { .. })));
    }

    #[test]
    fn tiny_sample_is_low_power() {
        let params = UrnParams::new(1, 3, 2, 0.25, 1, 1).unwrap();
        let k = derived_constants(&params).unwrap();
        let samples = centered_scaled_samples(&params, 50, 2, 3).unwrap();
        let report = clt_test(&samples, &k, &CltTolerances::default()).unwrap();
        assert!(report.verdicts().iter().all(|v| v.low_power && v.acceptable()));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let params = UrnParams::new(1, 3, 2, 0.25, 1, 1).unwrap();
        let a = centered_scaled_samples(&params, 200, 64, 11).unwrap();
        let b = centered_scaled_samples(&params, 200, 64, 11).unwrap();
        assert_eq!(a, b);
    }
}
