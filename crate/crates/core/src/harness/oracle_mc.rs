use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::stats::Summary;
use super::Verdict;
use crate::error::Result;
use crate::exact::{exact_distribution, Rational};
use crate::params::UrnParams;
use crate::replicate::map_replicates;
use crate::simulate::run_path;

/// Number of standard errors allowed between Monte Carlo and exact values.
const SE_MULTIPLIER: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub n: u64,
    pub replicates: u64,
    pub exact_mean: f64,
    pub exact_variance: f64,
    pub exact_total_mean: f64,
    pub proportion: Summary,
    pub total: Summary,
    pub mean: Verdict,
    pub variance: Verdict,
    pub total_mean: Verdict,
}

impl OracleComparison {
    pub fn verdicts(&self) -> [&Verdict; 3] {
        [&self.mean, &self.variance, &self.total_mean]
    }
}

/// Compares Monte Carlo moments of `Z_n` and `T_n` with the exact law.
/// Each difference must lie within four standard errors.
pub fn oracle_vs_monte_carlo(params: &UrnParams, n: u64, replicates: u64, master_seed: u64) -> Result<OracleComparison> {
    let dist = exact_distribution::<Rational>(params, n)?;
    let mean_q = dist.expect(|k| dist.proportion(k));
    let second_q = dist.expect(|k| {
        let z = dist.proportion(k);
        &z * &z
    });
    let var_q = second_q - &mean_q * &mean_q;
    let total_q = dist.expect(|k| Rational::from_integer(k.composition(params).1.into()));
    let exact_mean = mean_q.to_f64().unwrap_or(f64::NAN);
    let exact_variance = var_q.to_f64().unwrap_or(f64::NAN);
    let exact_total_mean = total_q.to_f64().unwrap_or(f64::NAN);

    let finals = map_replicates(master_seed, replicates, |_, rng| {
        let s = run_path(params, rng, n, |_, _, _| {});
        (s.z, s.t as f64)
    });
    let zs: Vec<f64> = finals.iter().map(|f| f.0).collect();
    let ts: Vec<f64> = finals.iter().map(|f| f.1).collect();
    let (proportion, total) = (Summary::of(&zs), Summary::of(&ts));

    let check = |id: &str, observed: f64, exact: f64, se: f64| {
        Verdict::two_sided(id, observed, exact, SE_MULTIPLIER * se).with_standard_error(se)
    };
    let mean = check("oracle.mean_proportion", proportion.mean, exact_mean, proportion.std_error_mean());
    let variance = check("oracle.variance_proportion", proportion.variance, exact_variance, proportion.std_error_variance());
    let total_mean = check("oracle.mean_total", total.mean, exact_total_mean, total.std_error_mean());

    Ok(OracleComparison {
        n,
        replicates,
        exact_mean,
        exact_variance,
        exact_total_mean,
        proportion,
        total,
        mean,
        variance,
        total_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::derived_constants;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_total_mean_is_linear() {
        let params = UrnParams::new(1, 3, 2, 0.25, 1, 1).unwrap();
        let k = derived_constants(&params).unwrap();
        let cmp = oracle_vs_monte_carlo(&params, 6, 500, 1).unwrap();
        assert_abs_diff_eq!(cmp.exact_total_mean, 2.0 + 6.0 * k.lambda, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_start_has_mean_half() {
        let params = UrnParams::new(2, 2, 3, 0.5, 4, 4).unwrap();
        let cmp = oracle_vs_monte_carlo(&params, 5, 2000, 2).unwrap();
        assert_eq!(cmp.exact_mean, 0.5);
        assert!(cmp.verdicts().iter().all(|v| v.pass));
    }

    #[test]
    fn above_cap_propagates() {
        let params = UrnParams::new(1, 3, 2, 0.25, 1, 1).unwrap();
        assert!(oracle_vs_monte_carlo(&params, 17, 10, 0).is_err());
    }
}
