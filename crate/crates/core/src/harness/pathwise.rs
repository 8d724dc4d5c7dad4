use serde::{Deserialize, Serialize};

use super::Verdict;
use crate::params::UrnParams;
use crate::replicate::map_replicates;
use crate::simulate::{audit_path, PathwiseAudit};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwiseRun {
    pub params: UrnParams,
    pub audit: PathwiseAudit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwiseSuite {
    pub paths_per_set: u64,
    pub horizon: u64,
    pub runs: Vec<PathwiseRun>,
    pub verdicts: Vec<Verdict>,
}

impl PathwiseSuite {
    pub fn total(&self) -> PathwiseAudit {
        self.runs.iter().fold(PathwiseAudit::default(), |mut acc, r| {
            acc.merge(&r.audit);
            acc
        })
    }
}

/// Audits `paths` trajectories of length `horizon` for each parameter set and
/// reports one zero-violation verdict per pathwise guarantee.
pub fn pathwise_suite(param_sets: &[UrnParams], paths: u64, horizon: u64, master_seed: u64) -> PathwiseSuite {
    let runs: Vec<PathwiseRun> = param_sets
        .iter()
        .map(|params| {
            let audits = map_replicates(master_seed, paths, |_, rng| audit_path(params, rng, horizon));
            let audit = audits.iter().fold(PathwiseAudit::default(), |mut acc, a| {
                acc.merge(a);
                acc
            });
            PathwiseRun { params: *params, audit }
        })
        .collect();
    let mut suite = PathwiseSuite { paths_per_set: paths, horizon, runs, verdicts: Vec::new() };
    let total = suite.total();
    suite.verdicts = vec![
        Verdict::no_violations("pathwise.total_sandwich", total.total_sandwich),
        Verdict::no_violations("pathwise.increment_support", total.increment_support),
        Verdict::no_violations("pathwise.drift_bound", total.drift_bound),
        Verdict::no_violations("pathwise.innovation_bound", total.innovation_bound),
        Verdict::no_violations("pathwise.proportion_identity", total.proportion_identity),
        Verdict::no_violations("pathwise.state_consistency", total.state_consistency),
    ];
    suite
}
