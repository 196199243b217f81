//! Fingerprint config files.

use std::path::Path;

use qonline::pneh::{FingerprintConfig, FingerprintVerification};
use serde::Serialize;

use crate::error::{read_file, Result};
use crate::report::Num;

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    #[serde(rename = "L")]
    pub l: u32,
    pub t: usize,
    pub epsilon: Num,
    pub max_accept: Num,
    pub worst_d: u64,
    pub passed: bool,
}

impl VerificationReport {
    fn new(config: &FingerprintConfig, v: FingerprintVerification) -> Self {
        Self {
            l: config.l,
            t: config.t,
            epsilon: Num(config.epsilon),
            max_accept: Num(v.max_accept),
            worst_d: v.worst_d,
            passed: v.passed,
        }
    }
}

pub fn load_config(path: &Path) -> Result<FingerprintConfig> {
    let config: FingerprintConfig = serde_json::from_str(&read_file(path)?)?;
    config.check_shape()?;
    Ok(config)
}

/// Re-runs the exhaustive check on a config file.
pub fn verify_fingerprint(path: &Path) -> Result<VerificationReport> {
    let config = load_config(path)?;
    let verdict = config.verify()?;
    Ok(VerificationReport::new(&config, verdict))
}

pub fn verify_config(config: &FingerprintConfig) -> Result<VerificationReport> {
    Ok(VerificationReport::new(config, config.verify()?))
}
