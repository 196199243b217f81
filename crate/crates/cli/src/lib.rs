//! Scenario runner for the `qonline` simulator: a catalog of reproducible
//! experiments, each reporting a JSON summary and a pass/fail predicate.

pub mod error;
pub mod fingerprint;
pub mod params;
pub mod report;
pub mod scenarios;

pub use error::{CliError, Result};
pub use report::Report;
pub use scenarios::{find_scenario, run_scenario, Mode, RunConfig, Scenario, CATALOG};
