//! Experiment configuration: a TOML file with a fixed key set, overridden by
//! command-line flags.
//!
//! ```toml
//! experiment = "clt"
//! horizon = 5000
//! replicates = 20000
//! master_seed = 42
//!
//! [params]
//! a = 1
//! b = 3
//! c = 2
//! p = "1/4"
//! y1_0 = 1
//! y2_0 = 1
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use toml::{Table, Value};
use urn_core::{validate_params, UrnParams};

pub const WORKERS_ENV: &str = "URN_WORKERS";
pub const DEFAULT_REPLICATES: u64 = 10_000;
pub const DEFAULT_T_MAX: f64 = 3.0;
pub const DEFAULT_T_POINTS: usize = 61;

const TOP_LEVEL_KEYS: &[&str] = &[
    "params",
    "experiment",
    "horizon",
    "replicates",
    "master_seed",
    "epsilon",
    "t_max",
    "t_points",
    "n_grid",
    "workers",
    "output_path",
    "samples_path",
];
const PARAM_KEYS: &[&str] = &["a", "b", "c", "p", "y1_0", "y2_0"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },
    #[error("experiment `{experiment}` requires `{field}`")]
    Missing { experiment: Experiment, field: &'static str },
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("invalid parameters: {0}")]
    Validation(#[from] urn_core::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn parse_err(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Parse { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Constants,
    Simulate,
    Clt,
    Ldp,
    Lil,
    Cf,
    Couple,
    Oracle,
    Recursion,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Constants,
        Experiment::Simulate,
        Experiment::Clt,
        Experiment::Ldp,
        Experiment::Lil,
        Experiment::Cf,
        Experiment::Couple,
        Experiment::Oracle,
        Experiment::Recursion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Constants => "constants",
            Experiment::Simulate => "simulate",
            Experiment::Clt => "clt",
            Experiment::Ldp => "ldp",
            Experiment::Lil => "lil",
            Experiment::Cf => "cf",
            Experiment::Couple => "couple",
            Experiment::Oracle => "oracle",
            Experiment::Recursion => "recursion",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| parse_err("experiment", format!("unknown experiment `{s}`")))
    }
}

/// A validated experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub params: UrnParams,
    pub experiment: Experiment,
    pub horizon: u64,
    pub replicates: u64,
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_grid: Option<Vec<u64>>,
    /// Execution setting; results never depend on it.
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub output_path: Option<String>,
    #[serde(skip)]
    pub samples_path: Option<String>,
}

/// Raw settings before defaults and validation. Both the file and the flags
/// produce one of these; [`RawConfig::merge`] lets the flags win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub a: Option<i64>,
    pub b: Option<i64>,
    pub c: Option<i64>,
    pub p: Option<f64>,
    pub y1_0: Option<i64>,
    pub y2_0: Option<i64>,
    pub experiment: Option<Experiment>,
    pub horizon: Option<u64>,
    pub replicates: Option<u64>,
    pub master_seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub t_max: Option<f64>,
    pub t_points: Option<usize>,
    pub n_grid: Option<Vec<u64>>,
    pub workers: Option<usize>,
    pub output_path: Option<String>,
    pub samples_path: Option<String>,
}

macro_rules! take_over {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f; })*
    };
}

impl RawConfig {
    pub fn merge(mut self, over: RawConfig) -> RawConfig {
        take_over!(
            self, over, a, b, c, p, y1_0, y2_0, experiment, horizon, replicates, master_seed, epsilon, t_max,
            t_points, n_grid, workers, output_path, samples_path
        );
        self
    }
}

/// Parses `"0.25"`, `"1/4"`, or `"1"` as a probability.
pub fn parse_probability(s: &str) -> Result<f64, ConfigError> {
    let s = s.trim();
    if s.contains('/') {
        let r: Ratio<i64> = s.parse().map_err(|e| parse_err("params.p", format!("bad rational `{s}`: {e}")))?;
        Ok(*r.numer() as f64 / *r.denom() as f64)
    } else {
        s.parse::<f64>().map_err(|e| parse_err("params.p", format!("bad number `{s}`: {e}")))
    }
}

/// Parses a comma-separated list of steps, e.g. `100,200,400`.
pub fn parse_grid(s: &str) -> Result<Vec<u64>, ConfigError> {
    s.split(',')
        .map(|x| x.trim().parse::<u64>().map_err(|e| parse_err("n_grid", format!("bad entry `{x}`: {e}"))))
        .collect()
}

fn as_int(field: &str, v: &Value) -> Result<i64, ConfigError> {
    v.as_integer().ok_or_else(|| parse_err(field, format!("expected an integer, found {}", v.type_str())))
}

fn as_u64(field: &str, v: &Value) -> Result<u64, ConfigError> {
    let i = as_int(field, v)?;
    u64::try_from(i).map_err(|_| parse_err(field, format!("must be non-negative, got {i}")))
}

fn as_float(field: &str, v: &Value) -> Result<f64, ConfigError> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(parse_err(field, format!("expected a number, found {}", v.type_str()))),
    }
}

fn as_string(field: &str, v: &Value) -> Result<String, ConfigError> {
    v.as_str()
        .map(str::to_owned)
        .ok_or_else(|| parse_err(field, format!("expected a string, found {}", v.type_str())))
}

/// Parses the TOML schema documented at the top of this module. Unknown keys
/// are rejected by name.
pub fn parse_str(text: &str) -> Result<RawConfig, ConfigError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| parse_err("<file>", e.to_string()))?;
    let mut raw = RawConfig::default();
    for (key, value) in &table {
        match key.as_str() {
            "params" => {
                let params = value
                    .as_table()
                    .ok_or_else(|| parse_err("params", format!("expected a table, found {}", value.type_str())))?;
                for (pk, pv) in params {
                    let field = format!("params.{pk}");
                    match pk.as_str() {
                        "a" => raw.a = Some(as_int(&field, pv)?),
                        "b" => raw.b = Some(as_int(&field, pv)?),
                        "c" => raw.c = Some(as_int(&field, pv)?),
                        "y1_0" => raw.y1_0 = Some(as_int(&field, pv)?),
                        "y2_0" => raw.y2_0 = Some(as_int(&field, pv)?),
                        "p" => {
                            raw.p = Some(match pv {
                                Value::String(s) => parse_probability(s)?,
                                other => as_float(&field, other)?,
                            })
                        }
                        _ => {
                            return Err(parse_err(field, format!("unknown key; expected one of {}", PARAM_KEYS.join(", "))))
                        }
                    }
                }
            }
            "experiment" => raw.experiment = Some(as_string(key, value)?.parse()?),
            "horizon" => raw.horizon = Some(as_u64(key, value)?),
            "replicates" => raw.replicates = Some(as_u64(key, value)?),
            "master_seed" => {
                raw.master_seed = Some(match value {
                    Value::String(s) => s.parse().map_err(|e| parse_err(key, format!("bad seed `{s}`: {e}")))?,
                    other => as_u64(key, other)?,
                })
            }
            "epsilon" => raw.epsilon = Some(as_float(key, value)?),
            "t_max" => raw.t_max = Some(as_float(key, value)?),
            "t_points" => raw.t_points = Some(as_u64(key, value)? as usize),
            "n_grid" => {
                let list = value
                    .as_array()
                    .ok_or_else(|| parse_err(key, format!("expected an array, found {}", value.type_str())))?;
                raw.n_grid = Some(list.iter().map(|v| as_u64(key, v)).collect::<Result<_, _>>()?);
            }
            "workers" => raw.workers = Some(as_u64(key, value)? as usize),
            "output_path" => raw.output_path = Some(as_string(key, value)?),
            "samples_path" => raw.samples_path = Some(as_string(key, value)?),
            _ => {
                return Err(parse_err(key.clone(), format!("unknown key; expected one of {}", TOP_LEVEL_KEYS.join(", "))))
            }
        }
    }
    Ok(raw)
}

pub fn parse_file(path: &Path) -> Result<RawConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse_str(&text)
}

/// `URN_WORKERS` if set and positive, else the number of available cores.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

impl RawConfig {
    /// Applies defaults and checks the experiment-specific requirements.
    pub fn finish(self) -> Result<ExperimentConfig, ConfigError> {
        let require = |field: &'static str, v: Option<i64>| v.ok_or(parse_err(format!("params.{field}"), "missing"));
        let params = UrnParams::from_signed(
            require("a", self.a)?,
            require("b", self.b)?,
            require("c", self.c)?,
            self.p.ok_or(parse_err("params.p", "missing"))?,
            self.y1_0.unwrap_or(1),
            self.y2_0.unwrap_or(1),
        )?;
        let params = validate_params(params)?;
        let experiment = self.experiment.ok_or(parse_err("experiment", "missing"))?;

        let needs_horizon = !matches!(experiment, Experiment::Constants | Experiment::Ldp);
        if needs_horizon && self.horizon.is_none() {
            return Err(ConfigError::Missing { experiment, field: "horizon" });
        }
        if experiment == Experiment::Ldp {
            if self.epsilon.is_none() {
                return Err(ConfigError::Missing { experiment, field: "epsilon" });
            }
            if self.n_grid.is_none() {
                return Err(ConfigError::Missing { experiment, field: "n_grid" });
            }
        }
        let replicates = self.replicates.unwrap_or(DEFAULT_REPLICATES);
        if replicates < 1 {
            return Err(ConfigError::Invalid { field: "replicates", message: "must be at least 1".into() });
        }
        if let Some(w) = self.workers {
            if w < 1 {
                return Err(ConfigError::Invalid { field: "workers", message: "must be at least 1".into() });
            }
        }
        if let Some(t) = self.t_points {
            if t < 1 {
                return Err(ConfigError::Invalid { field: "t_points", message: "must be at least 1".into() });
            }
        }
        if let Some(t) = self.t_max {
            if !t.is_finite() || t < 0.0 {
                return Err(ConfigError::Invalid { field: "t_max", message: format!("must be finite and >= 0, got {t}") });
            }
        }

        Ok(ExperimentConfig {
            params,
            experiment,
            horizon: self.horizon.unwrap_or(0),
            replicates,
            master_seed: self.master_seed.unwrap_or(0),
            epsilon: self.epsilon,
            t_max: self.t_max,
            t_points: self.t_points,
            n_grid: self.n_grid,
            workers: self.workers.unwrap_or_else(default_workers),
            output_path: self.output_path,
            samples_path: self.samples_path,
        })
    }
}

impl ExperimentConfig {
    /// The `t` grid for characteristic-function experiments: `t_points`
    /// evenly spaced values on `[-t_max, t_max]`.
    pub fn t_grid(&self) -> Vec<f64> {
        let t_max = self.t_max.unwrap_or(DEFAULT_T_MAX);
        urn_core::harness::linspace(-t_max, t_max, self.t_points.unwrap_or(DEFAULT_T_POINTS))
    }

    /// Renders the configuration in the file schema. Parsing the output gives
    /// back an equal configuration.
    pub fn to_toml(&self) -> String {
        let mut top = Table::new();
        let mut params = Table::new();
        let p = &self.params;
        params.insert("a".into(), Value::Integer(p.a as i64));
        params.insert("b".into(), Value::Integer(p.b as i64));
        params.insert("c".into(), Value::Integer(p.c as i64));
        params.insert("p".into(), Value::Float(p.p));
        params.insert("y1_0".into(), Value::Integer(p.y1_0 as i64));
        params.insert("y2_0".into(), Value::Integer(p.y2_0 as i64));
        top.insert("experiment".into(), Value::String(self.experiment.name().into()));
        top.insert("horizon".into(), Value::Integer(self.horizon as i64));
        top.insert("replicates".into(), Value::Integer(self.replicates as i64));
        // seeds above i64::MAX do not fit a TOML integer
        top.insert("master_seed".into(), Value::String(self.master_seed.to_string()));
        if let Some(e) = self.epsilon {
            top.insert("epsilon".into(), Value::Float(e));
        }
        if let Some(t) = self.t_max {
            top.insert("t_max".into(), Value::Float(t));
        }
        if let Some(t) = self.t_points {
            top.insert("t_points".into(), Value::Integer(t as i64));
        }
        if let Some(g) = &self.n_grid {
            top.insert("n_grid".into(), Value::Array(g.iter().map(|&n| Value::Integer(n as i64)).collect()));
        }
        top.insert("workers".into(), Value::Integer(self.workers as i64));
        if let Some(o) = &self.output_path {
            top.insert("output_path".into(), Value::String(o.clone()));
        }
        if let Some(s) = &self.samples_path {
            top.insert("samples_path".into(), Value::String(s.clone()));
        }
        top.insert("params".into(), Value::Table(params));
        toml::to_string(&top).expect("tables always serialize")
    }
}
