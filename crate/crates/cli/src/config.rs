// Copyright 2026 aptsim Contributors
// SPDX-License-Identifier: Apache-2.0

//! Per-command JSON config files. A config file supplies the same values as
//! the command's flags (plus the noise model, which has no flag form);
//! explicitly passed flags win over file values.

use crate::{CalibrationKind, CliError, InitialState};
use aptsim::lab::NoiseModel;
use serde::Deserialize;
use std::path::Path;

pub fn load<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("malformed config {}: {e}", path.display())))
}

/// `flag.or(file).ok_or(config error naming the flag)`
pub fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T, CliError> {
    flag.or(file)
        .ok_or_else(|| CliError::Config(format!("missing required parameter --{name}")))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveFile {
    pub j: Option<f64>,
    pub gamma: Option<f64>,
    pub tau_max: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigensweepFile {
    pub gamma: Option<f64>,
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
    pub ratio_step: Option<f64>,
    pub ratios: Option<Vec<f64>>,
    pub repeats: Option<usize>,
    pub exact: Option<bool>,
    pub shots: Option<u64>,
    pub noise_model: Option<NoiseModel>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryFile {
    pub j: Option<f64>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    pub steps: Option<usize>,
    pub initial: Option<InitialState>,
    pub allow_continuation: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographyFile {
    pub ratio: Option<f64>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    pub ideal: Option<bool>,
    pub shots: Option<u64>,
    pub noise_model: Option<NoiseModel>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateFile {
    pub kind: Option<CalibrationKind>,
    pub gamma: Option<f64>,
    pub j: Option<f64>,
    pub points: Option<usize>,
    pub exact: Option<bool>,
    pub shots: Option<u64>,
    pub noise_model: Option<NoiseModel>,
}
