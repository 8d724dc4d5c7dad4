//! Two-color Polya-Friedman mixed urn: simulation, an exact small-`n` oracle,
//! the deterministic recursions behind its limit theorems, and Monte Carlo
//! checks of those theorems.
//!
//! ```
//! use urn_core::{derived_constants, simulate, UrnParams};
//!
//! let params = UrnParams::new(1, 3, 2, 0.25, 1, 1).unwrap();
//! let k = derived_constants(&params).unwrap();
//! assert!((k.limit_variance.unwrap() - 0.8).abs() < 1e-12);
//!
//! let path = simulate(&params, 42, 1000, &[10, 100, 1000]).unwrap();
//! assert_eq!(path.checkpoints.len(), 3);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod harness;
pub mod params;
pub mod recursions;
pub mod replicate;
pub mod seed;
pub mod simulate;

pub use constants::{derived_constants, exact_constants, DerivedConstants, ExactConstants};
pub use dynamics::{drift, step, BallType, DrawOutcome, Rule, StepDelta, UrnState};
pub use error::{Error, Result};
pub use params::{validate_params, UrnParams};
pub use seed::{derive_seed, replicate_rng, SEED_RULE_ID};
pub use simulate::{simulate, Checkpoint, Trajectory};
