//! Monte Carlo estimators for the limit theorems, each ending in one or more
//! [`Verdict`]s.
//!
//! Estimators are pure functions of their inputs: replicate streams come from
//! [`crate::seed`], and every aggregation runs in replicate-index order, so the
//! output does not depend on how many threads produced the samples.

mod cf;
mod clt;
mod coupling;
mod growth;
mod ldp;
mod lil;
mod oracle_mc;
mod pathwise;
mod stats;
mod verdict;

pub use cf::{cf_gap, empirical_cf, CfGapPoint, CfGapReport, DEFAULT_CF_GAP_TOLERANCE};
pub use clt::{centered_scaled_samples, clt_test, ks_distance, CltReport, CltTolerances, MIN_POWERED_REPLICATES};
pub use coupling::{coupling_l1, CouplingPoint, CouplingReport, CouplingState, BURN_IN};
pub use growth::{
    conditional_variance_plugin, conditional_variance_track, growth_rate, ConditionalVarianceTrack,
    CONDITIONAL_VARIANCE_TOLERANCE,
};
pub use ldp::{ldp_decay, LdpPoint, LdpReport, MIN_EXCEEDANCES};
pub use lil::{lil_envelope, lil_statistic, LilReport, ENVELOPE_FACTOR, MIN_LIL_CHECKPOINT};
pub use oracle_mc::{oracle_vs_monte_carlo, OracleComparison};
pub use pathwise::{pathwise_suite, PathwiseSuite};
pub use stats::{Summary, linspace};
pub use verdict::{Sense, Verdict};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::UrnParams;

/// One statistic per replicate at a fixed horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub params: UrnParams,
    pub n: u64,
    pub values: Vec<f64>,
    pub master_seed: u64,
    pub seed_rule: String,
}

impl SampleSet {
    pub fn new(params: UrnParams, n: u64, values: Vec<f64>, master_seed: u64) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSamples(format!("need at least 2 replicates, got {}", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSamples(format!("replicate {i} is not finite")));
        }
        Ok(SampleSet { params, n, values, master_seed, seed_rule: crate::seed::SEED_RULE_ID.to_string() })
    }

    pub fn replicates(&self) -> usize {
        self.values.len()
    }
}
