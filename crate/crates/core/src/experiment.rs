//! Parameter sweeps over (SNR, feedback count, estimator) and their
//! serialized reports.
//!
//! A sweep evaluates every grid cell through [`metrics::empirical_mse_profile`]
//! with one shared master seed, so the channel and noise draws of trial `t`
//! are identical in every cell. Reports serialize to a CSV file with the
//! fixed header
//!
//! ```text
//! snr_db,m,estimator,mse_mean,mse_std_error,rel_reduction_pct,n_trials
//! ```
//!
//! plus a plain-text metadata sidecar (`key = value` lines) carrying the
//! master seed, a digest of the system configuration, the library version
//! and the wall-clock time of the run. Cell rows are ordered by
//! (SNR, m, estimator) grid position, so the CSV bytes do not depend on
//! execution order; two runs of the same spec produce identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::channel::SystemConfig;
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::metrics::{self, MseEstimate};

/// Exact CSV header emitted by [`emit_report`].
pub const CSV_HEADER: &str = "snr_db,m,estimator,mse_mean,mse_std_error,rel_reduction_pct,n_trials";

/// Default trial budget per sweep cell.
pub const DEFAULT_TRIALS: usize = 100_000;

/// Default master seed of the reproduction sweep.
pub const DEFAULT_SEED: u64 = 1;

/// Full description of a sweep: the grids, the trial budget, the master
/// seed and the system configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// SNR grid in dB, in presentation order.
    pub snr_grid_db: Vec<f64>,
    /// Feedback-count grid, in presentation order.
    pub m_grid: Vec<usize>,
    /// Estimators to evaluate, in presentation order.
    pub estimators: Vec<EstimatorKind>,
    /// Monte-Carlo trials per cell.
    pub n_trials: usize,
    /// Master seed; every random stream of the sweep derives from it.
    pub master_seed: u64,
    /// System dimensions and prior. The energy/noise scalars are overridden
    /// per cell by the SNR grid (noise power fixed to 1).
    pub config: SystemConfig,
}

impl SweepSpec {
    /// The reproduction sweep: 4 antennas, 4 users, identity prior, SNR
    /// from -40 to +40 dB in 5 dB steps, all feedback counts, both
    /// feedback estimators.
    pub fn default_reproduction() -> Self {
        let config =
            SystemConfig::identity_prior(4, 4, 1.0, 1.0).expect("default configuration is valid");
        Self {
            snr_grid_db: (-8..=8).map(|k| 5.0 * k as f64).collect(),
            m_grid: (0..=4).collect(),
            estimators: vec![EstimatorKind::MmseFeedback, EstimatorKind::MapFeedback],
            n_trials: DEFAULT_TRIALS,
            master_seed: DEFAULT_SEED,
            config,
        }
    }

    /// Checks the grids against the configuration.
    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::InvalidSpec("SNR grid is empty".into()));
        }
        if let Some(bad) = self.snr_grid_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::InvalidSpec(format!("SNR value {bad} is not finite")));
        }
        if self.m_grid.is_empty() {
            return Err(Error::InvalidSpec("feedback-count grid is empty".into()));
        }
        if let Some(&bad) = self.m_grid.iter().find(|&&m| m > self.config.n_antennas()) {
            return Err(Error::InvalidSpec(format!(
                "feedback count {bad} exceeds the antenna count {}",
                self.config.n_antennas()
            )));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidSpec("estimator set is empty".into()));
        }
        if self.n_trials == 0 {
            return Err(Error::InvalidSpec("n_trials must be at least 1".into()));
        }
        Ok(())
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub snr_db: f64,
    pub m: usize,
    pub estimator: EstimatorKind,
    pub mse_mean: f64,
    pub mse_std_error: f64,
    /// Reduction over the same estimator's m = 0 cell, when the grid
    /// contains one.
    pub rel_reduction_pct: Option<f64>,
    pub n_trials: usize,
}

/// Provenance of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportMetadata {
    pub master_seed: u64,
    pub config_digest: String,
    pub version: String,
    pub wall_clock_seconds: f64,
}

/// The outcome of a sweep: cells in (SNR, m, estimator) grid order plus
/// provenance metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    cells: Vec<SweepCell>,
    metadata: ReportMetadata,
}

impl SweepReport {
    pub fn cells(&self) -> &[SweepCell] {
        &self.cells
    }

    pub fn metadata(&self) -> &ReportMetadata {
        &self.metadata
    }

    /// The CSV serialization (header plus one row per cell).
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.cells.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for cell in &self.cells {
            let reduction = cell.rel_reduction_pct.map(fmt_sig9).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_sig9(cell.snr_db),
                cell.m,
                cell.estimator,
                fmt_sig9(cell.mse_mean),
                fmt_sig9(cell.mse_std_error),
                reduction,
                cell.n_trials
            );
        }
        out
    }

    /// The metadata sidecar serialization (`key = value` lines).
    pub fn metadata_text(&self) -> String {
        format!(
            "master_seed = {}\nconfig_digest = {}\nversion = {}\nwall_clock_seconds = {:.6}\n",
            self.metadata.master_seed,
            self.metadata.config_digest,
            self.metadata.version,
            self.metadata.wall_clock_seconds
        )
    }
}

/// Runs every cell of the sweep.
///
/// Groups of cells sharing (SNR, estimator) are evaluated in one pass over
/// the trial budget with common random numbers across the m grid; the
/// groups themselves may run in parallel. Cell order in the report is the
/// grid order regardless of scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepReport> {
    spec.validate()?;
    let start = Instant::now();

    let groups: Vec<(usize, usize)> = (0..spec.snr_grid_db.len())
        .flat_map(|s| (0..spec.estimators.len()).map(move |e| (s, e)))
        .collect();
    let profiles: Vec<Result<Vec<MseEstimate>>> = groups
        .par_iter()
        .map(|&(s, e)| {
            metrics::empirical_mse_profile(
                spec.estimators[e],
                &spec.m_grid,
                spec.snr_grid_db[s],
                &spec.config,
                spec.n_trials,
                spec.master_seed,
            )
        })
        .collect();

    let baseline_slot = spec.m_grid.iter().position(|&m| m == 0);
    let mut cells = Vec::with_capacity(groups.len() * spec.m_grid.len());
    let mut by_group = Vec::with_capacity(groups.len());
    for profile in profiles {
        by_group.push(profile?);
    }
    for (s, &snr_db) in spec.snr_grid_db.iter().enumerate() {
        for (k, &m) in spec.m_grid.iter().enumerate() {
            for (e, &estimator) in spec.estimators.iter().enumerate() {
                let profile = &by_group[s * spec.estimators.len() + e];
                let estimate = profile[k];
                let rel_reduction_pct = match baseline_slot {
                    Some(b) => Some(metrics::relative_reduction(&profile[b], &estimate)?),
                    None => None,
                };
                cells.push(SweepCell {
                    snr_db,
                    m,
                    estimator,
                    mse_mean: estimate.mean,
                    mse_std_error: estimate.std_error,
                    rel_reduction_pct,
                    n_trials: estimate.n_trials,
                });
            }
        }
    }

    Ok(SweepReport {
        cells,
        metadata: ReportMetadata {
            master_seed: spec.master_seed,
            config_digest: config_digest(&spec.config),
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        },
    })
}

/// Writes the CSV to `destination` and the metadata sidecar next to it
/// (same path with the extension replaced by `meta`).
pub fn emit_report(report: &SweepReport, destination: &Path) -> Result<()> {
    let write = |path: &Path, contents: &str| {
        fs::write(path, contents).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    write(destination, &report.to_csv())?;
    write(&sidecar_path(destination), &report.metadata_text())
}

/// The metadata sidecar path belonging to a CSV destination.
pub fn sidecar_path(destination: &Path) -> PathBuf {
    destination.with_extension("meta")
}

/// Stable hex digest of a configuration (first 16 hex characters of the
/// SHA-256 of a canonical rendering).
pub fn config_digest(config: &SystemConfig) -> String {
    let mut canonical = format!(
        "n_antennas={};n_users={};pilot_energy={:?};noise_power={:?};frame_slots={:?};symbols_per_slot={:?};prior=",
        config.n_antennas(),
        config.n_users(),
        config.pilot_energy(),
        config.noise_power(),
        config.frame_slots(),
        config.symbols_per_slot(),
    );
    for row in config.prior_variance_rows() {
        let _ = write!(canonical, "{row:?};");
    }
    let digest = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(16);
    for byte in &digest[..8] {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

/// Formats a float with 9 significant digits in positional notation
/// (scientific for extreme magnitudes), so emitted files are byte-stable.
pub fn fmt_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0.00000000".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    if !(-4..=12).contains(&exponent) {
        return format!("{v:.8e}");
    }
    let decimals = (8 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}
