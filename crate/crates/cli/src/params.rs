//! `--params key=value` handling.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Resolved scenario parameters: every key is known and has a value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    /// Applies `overrides` (`key=value`, optionally comma-separated) on top
    /// of `defaults`; keys outside `defaults` are rejected.
    pub fn resolve(defaults: &[(&str, &str)], overrides: &[String]) -> Result<Self> {
        let mut values: BTreeMap<String, String> =
            defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        for item in overrides.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("parameter '{item}' is not key=value")))?;
            let key = key.trim();
            if !values.contains_key(key) {
                let known: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
                return Err(CliError::Usage(format!(
                    "unknown parameter '{key}' (expected one of: {})",
                    known.join(", ")
                )));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self(values))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self
            .0
            .get(key)
            .ok_or_else(|| CliError::Usage(format!("missing parameter '{key}'")))?;
        raw.parse()
            .map_err(|e| CliError::Usage(format!("parameter {key}={raw}: {e}")))
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.0
    }
}
