//! Statistical self-checks behind the `verify` command.
//!
//! Each check exercises one analytic guarantee of the estimators against a
//! Monte-Carlo run: feedback never hurts the MMSE rule (monotonicity in the
//! feedback count and the deterministic lower bound), the two classical
//! rules coincide exactly, the Monte-Carlo loop is consistent with the
//! closed-form conditional MSE, and the feedback MAP approaches its
//! limiting MSE ratios of 2 and 1/2 at the SNR extremes.

use crate::channel::{observe_pilots, sample_channel, SystemConfig};
use crate::error::Result;
use crate::estimators::{
    conditional_second_moment, map_classical, mmse_estimate, ConditionalSecondMoment, EstimatorKind,
};
use crate::metrics::{
    self, asymptotic_ratio, conditional_mse, empirical_mse, empirical_mse_profile, mse_lower_bound,
    squared_error, EVALUATION_USER,
};
use crate::{channel, rng};

/// Trial budget and seed of a verification run.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub n_trials: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            n_trials: 100_000,
            seed: 1,
        }
    }
}

/// Result of one check.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

/// SNR points probed by the monotonicity check.
const MONOTONICITY_SNRS_DB: [f64; 3] = [-20.0, 0.0, 20.0];

/// Runs every check against `config` (dimensions and prior; energies are
/// overridden per probed SNR).
pub fn run_all(config: &SystemConfig, opts: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        check_monotonicity(config, opts)?,
        check_lower_bound(config, opts)?,
        check_classical_coincidence(config, opts),
        check_m0_reduction(config, opts)?,
        check_total_expectation(config, opts)?,
        check_ratio(config, opts, -40.0, 1.9..=2.1, "map_ratio_low_snr")?,
        check_ratio(config, opts, 40.0, 0.45..=0.55, "map_ratio_high_snr")?,
    ])
}

/// Feedback-MMSE MSE is non-increasing in the feedback count, within three
/// combined standard errors, at every probed SNR.
fn check_monotonicity(config: &SystemConfig, opts: &VerifyOptions) -> Result<CheckOutcome> {
    let m_grid: Vec<usize> = (0..=config.n_antennas()).collect();
    let mut passed = true;
    let mut detail = String::new();
    for snr_db in MONOTONICITY_SNRS_DB {
        let profile = empirical_mse_profile(
            EstimatorKind::MmseFeedback,
            &m_grid,
            snr_db,
            config,
            opts.n_trials,
            opts.seed,
        )?;
        for pair in profile.windows(2) {
            let tolerance = 3.0 * (pair[0].std_error.powi(2) + pair[1].std_error.powi(2)).sqrt();
            if pair[1].mean > pair[0].mean + tolerance {
                passed = false;
            }
        }
        let means: Vec<String> = profile.iter().map(|e| format!("{:.4}", e.mean)).collect();
        detail.push_str(&format!("{snr_db} dB: [{}] ", means.join(", ")));
    }
    Ok(CheckOutcome::new(
        "mmse_monotonicity",
        passed,
        detail.trim_end().to_string(),
    ))
}

/// Every feedback-MMSE MSE sits above the deterministic bound, minus three
/// standard errors, and the quadrature error meets its target.
fn check_lower_bound(config: &SystemConfig, opts: &VerifyOptions) -> Result<CheckOutcome> {
    let m_grid: Vec<usize> = (0..=config.n_antennas()).collect();
    let bound = mse_lower_bound(&config.at_snr_db(0.0), EVALUATION_USER);
    let profile = empirical_mse_profile(
        EstimatorKind::MmseFeedback,
        &m_grid,
        0.0,
        config,
        opts.n_trials,
        opts.seed,
    )?;
    let mut passed = bound.quadrature_error <= metrics::LOWER_BOUND_TARGET_ERROR;
    for estimate in &profile {
        if estimate.mean < bound.value - 3.0 * estimate.std_error {
            passed = false;
        }
    }
    let lowest = profile.iter().map(|e| e.mean).fold(f64::INFINITY, f64::min);
    Ok(CheckOutcome::new(
        "mmse_lower_bound",
        passed,
        format!(
            "bound = {:.6} (quadrature error {:.1e}), smallest empirical MSE = {lowest:.6}",
            bound.value, bound.quadrature_error
        ),
    ))
}

/// The classical MMSE and classical MAP produce bit-identical estimates.
fn check_classical_coincidence(config: &SystemConfig, opts: &VerifyOptions) -> CheckOutcome {
    let cfg = config.at_snr_db(0.0);
    let inputs = 10_000u64.min(opts.n_trials as u64);
    let mut identical = true;
    for trial in 0..inputs {
        let trial_seed = rng::derive_seed(opts.seed, trial);
        let ch = sample_channel(&cfg, rng::derive_seed(trial_seed, rng::STREAM_CHANNEL));
        let obs = observe_pilots(
            &ch,
            EVALUATION_USER,
            &cfg,
            rng::derive_seed(trial_seed, rng::STREAM_PILOT_NOISE),
        )
        .expect("evaluation user is within range");
        let mmse = mmse_estimate(
            &obs,
            &ConditionalSecondMoment::from_prior(cfg.prior_variances(EVALUATION_USER)),
            &cfg,
        );
        let map = map_classical(&obs, &cfg);
        if mmse.values() != map.values() {
            identical = false;
            break;
        }
    }
    CheckOutcome::new(
        "classical_coincidence",
        identical,
        format!("classical MMSE and MAP agree bit-for-bit on {inputs} random inputs"),
    )
}

/// The m = 0 feedback-MMSE run is bit-identical to the classical run.
fn check_m0_reduction(config: &SystemConfig, opts: &VerifyOptions) -> Result<CheckOutcome> {
    let feedback = empirical_mse(
        EstimatorKind::MmseFeedback,
        0,
        0.0,
        config,
        opts.n_trials,
        opts.seed,
    )?;
    let classical = empirical_mse(
        EstimatorKind::MmseClassical,
        0,
        0.0,
        config,
        opts.n_trials,
        opts.seed,
    )?;
    let passed = feedback.mean.to_bits() == classical.mean.to_bits()
        && feedback.std_error.to_bits() == classical.std_error.to_bits();
    Ok(CheckOutcome::new(
        "m0_reduction",
        passed,
        format!(
            "feedback m=0 mean = {:.6}, classical mean = {:.6}",
            feedback.mean, classical.mean
        ),
    ))
}

/// Law of total expectation: the Monte-Carlo feedback-MMSE MSE agrees with
/// the average closed-form conditional MSE over the disclosed moments.
fn check_total_expectation(config: &SystemConfig, opts: &VerifyOptions) -> Result<CheckOutcome> {
    let cfg = config.at_snr_db(0.0);
    let m = config.n_antennas() / 2;
    let mut diff_sum = 0.0;
    let mut diff_sq = 0.0;
    let n = opts.n_trials as u64;
    for trial in 0..n {
        let trial_seed = rng::derive_seed(opts.seed, trial);
        let ch = sample_channel(&cfg, rng::derive_seed(trial_seed, rng::STREAM_CHANNEL));
        let obs = observe_pilots(
            &ch,
            EVALUATION_USER,
            &cfg,
            rng::derive_seed(trial_seed, rng::STREAM_PILOT_NOISE),
        )
        .expect("evaluation user is within range");
        let disclosure = channel::disclose_gains(&ch, EVALUATION_USER, m)?;
        let moment = conditional_second_moment(&disclosure, cfg.prior_variances(EVALUATION_USER));
        let estimate = mmse_estimate(&obs, &moment, &cfg);
        let d = squared_error(estimate.values(), ch.user_coefficients(EVALUATION_USER))
            - conditional_mse(&moment, &cfg);
        diff_sum += d;
        diff_sq += d * d;
    }
    let mean = diff_sum / n as f64;
    let se = ((diff_sq / n as f64 - mean * mean) / n as f64).sqrt();
    let passed = mean.abs() <= 3.0 * se;
    Ok(CheckOutcome::new(
        "total_expectation",
        passed,
        format!(
            "Monte-Carlo minus conditional closed form = {mean:.2e} (3 SE = {:.2e})",
            3.0 * se
        ),
    ))
}

/// The feedback-MAP/classical-MAP MSE ratio lies in the expected window at
/// an SNR extreme.
fn check_ratio(
    config: &SystemConfig,
    opts: &VerifyOptions,
    snr_db: f64,
    window: std::ops::RangeInclusive<f64>,
    name: &'static str,
) -> Result<CheckOutcome> {
    let ratio = asymptotic_ratio(
        EstimatorKind::MapFeedback,
        snr_db,
        config,
        opts.n_trials,
        opts.seed,
    )?;
    let passed = window.contains(&ratio);
    Ok(CheckOutcome::new(
        name,
        passed,
        format!(
            "ratio = {ratio:.4} at {snr_db} dB, expected within [{}, {}]",
            window.start(),
            window.end()
        ),
    ))
}
