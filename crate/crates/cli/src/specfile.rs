//! Line-oriented sweep spec files.
//!
//! The format is `key = value` with `#` comments; list values are comma
//! separated. Recognized keys:
//!
//! ```text
//! snr_grid_db      = -40,-35,...,40      # SNR grid in dB
//! m_grid           = 0,1,2,3,4           # feedback counts
//! estimators       = mmse_feedback,map_feedback   # or `all`
//! n_trials         = 100000
//! master_seed      = 1
//! n_antennas       = 4
//! n_users          = 4
//! prior_variances  = 1,1,1,1             # one row, applied to every user
//! pilot_energy     = 1.0                 # base value; sweeps override per SNR
//! noise_power      = 1.0
//! frame_slots      = 10                  # optional frame metadata
//! symbols_per_slot = 14
//! ```
//!
//! Missing keys fall back to the default reproduction sweep.

use std::fs;
use std::path::Path;

use chanest_core::{EstimatorKind, SweepSpec, SystemConfig};

/// A spec file problem, with enough context to fix the line.
#[derive(Debug)]
pub struct SpecFileError(pub String);

impl std::fmt::Display for SpecFileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SpecFileError {}

fn err(message: impl Into<String>) -> SpecFileError {
    SpecFileError(message.into())
}

fn parse_list<T: std::str::FromStr>(value: &str, key: &str) -> Result<Vec<T>, SpecFileError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| err(format!("invalid entry `{v}` in `{key}`")))
        })
        .collect()
}

fn parse_scalar<T: std::str::FromStr>(value: &str, key: &str) -> Result<T, SpecFileError> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| err(format!("invalid value `{value}` for `{key}`")))
}

/// Parses the estimator list; `all` expands to all four tags.
pub fn parse_estimators(value: &str) -> Result<Vec<EstimatorKind>, SpecFileError> {
    if value.trim() == "all" {
        return Ok(EstimatorKind::ALL.to_vec());
    }
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<EstimatorKind>().map_err(|e| err(e.to_string())))
        .collect()
}

/// Loads a sweep spec, starting from the default reproduction sweep and
/// overriding whatever the file provides.
pub fn load(path: &Path) -> Result<SweepSpec, SpecFileError> {
    let contents = fs::read_to_string(path)
        .map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
    let mut spec = SweepSpec::default_reproduction();

    let mut n_antennas = spec.config.n_antennas();
    let mut n_users = spec.config.n_users();
    let mut pilot_energy = spec.config.pilot_energy();
    let mut noise_power = spec.config.noise_power();
    let mut prior_row: Option<Vec<f64>> = None;
    let mut frame_slots: Option<u32> = None;
    let mut symbols_per_slot: Option<u32> = None;
    let mut config_touched = false;

    for (number, raw) in contents.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("line {}: expected `key = value`", number + 1)))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "snr_grid_db" => spec.snr_grid_db = parse_list(value, key)?,
            "m_grid" => spec.m_grid = parse_list(value, key)?,
            "estimators" => spec.estimators = parse_estimators(value)?,
            "n_trials" => spec.n_trials = parse_scalar(value, key)?,
            "master_seed" => spec.master_seed = parse_scalar(value, key)?,
            "n_antennas" => {
                n_antennas = parse_scalar(value, key)?;
                config_touched = true;
            }
            "n_users" => {
                n_users = parse_scalar(value, key)?;
                config_touched = true;
            }
            "prior_variances" => {
                prior_row = Some(parse_list(value, key)?);
                config_touched = true;
            }
            "pilot_energy" => {
                pilot_energy = parse_scalar(value, key)?;
                config_touched = true;
            }
            "noise_power" => {
                noise_power = parse_scalar(value, key)?;
                config_touched = true;
            }
            "frame_slots" => {
                frame_slots = Some(parse_scalar(value, key)?);
                config_touched = true;
            }
            "symbols_per_slot" => {
                symbols_per_slot = Some(parse_scalar(value, key)?);
                config_touched = true;
            }
            other => return Err(err(format!("line {}: unknown key `{other}`", number + 1))),
        }
    }

    if config_touched {
        let row = match prior_row {
            Some(row) => {
                if row.len() != n_antennas {
                    return Err(err(format!(
                        "prior_variances has {} entries, expected n_antennas = {n_antennas}",
                        row.len()
                    )));
                }
                row
            }
            None => vec![1.0; n_antennas],
        };
        let mut config = SystemConfig::new(
            n_antennas,
            n_users,
            pilot_energy,
            noise_power,
            vec![row; n_users],
        )
        .map_err(|e| err(e.to_string()))?;
        if let (Some(slots), Some(symbols)) = (frame_slots, symbols_per_slot) {
            config = config.with_frame_metadata(slots, symbols);
        }
        spec.config = config;
    }
    Ok(spec)
}
