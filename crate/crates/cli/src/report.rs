use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use urn_core::harness::{SampleSet, Verdict};
use urn_core::DerivedConstants;

use crate::config::{Experiment, ExperimentConfig};

pub const TOOL: &str = "urn";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedAudit {
    pub master_seed: u64,
    pub rule: String,
}

/// Settings and measurements that vary between otherwise identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub workers: usize,
    pub wall_clock_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub tool: String,
    pub version: String,
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub config_sha256: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constants: Option<DerivedConstants>,
    pub seed_audit: SeedAudit,
    pub verdicts: Vec<Verdict>,
    pub passed: bool,
    pub warnings: Vec<String>,
    pub summary: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub execution: Option<Execution>,
}

/// SHA-256 of the JSON config echo.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let json = serde_json::to_vec(config).expect("config serializes");
    hex::encode(Sha256::digest(&json))
}

impl ExperimentReport {
    pub fn new(
        config: &ExperimentConfig,
        constants: Option<DerivedConstants>,
        verdicts: Vec<Verdict>,
        warnings: Vec<String>,
        summary: serde_json::Value,
    ) -> Self {
        let passed = verdicts.iter().all(Verdict::acceptable);
        ExperimentReport {
            tool: TOOL.into(),
            version: VERSION.into(),
            experiment: config.experiment,
            config: config.clone(),
            config_sha256: config_hash(config),
            constants,
            seed_audit: SeedAudit { master_seed: config.master_seed, rule: urn_core::SEED_RULE_ID.into() },
            verdicts,
            passed,
            warnings,
            summary,
            execution: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The report without its execution block. Two runs of the same config
    /// give identical strings whatever their worker counts.
    pub fn deterministic_json(&self) -> String {
        ExperimentReport { execution: None, ..self.clone() }.to_json()
    }
}

/// Writes the samples one per line under a `#` header naming the config hash.
pub fn write_samples<W: Write>(mut out: W, report: &ExperimentReport, samples: &SampleSet) -> io::Result<()> {
    writeln!(
        out,
        "# experiment={} n={} replicates={} master_seed={} seed_rule={} config_sha256={}",
        report.experiment,
        samples.n,
        samples.replicates(),
        samples.master_seed,
        samples.seed_rule,
        report.config_sha256
    )?;
    writeln!(out, "value")?;
    for v in &samples.values {
        writeln!(out, "{v}")?;
    }
    Ok(())
}
