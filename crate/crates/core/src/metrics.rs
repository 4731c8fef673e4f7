//! Analytic and Monte-Carlo mean-squared-error quantities.
//!
//! The conditional MSE of the shrinkage estimator has the closed form
//! `sum_i N0 * mu_i / (E * mu_i + N0)`; the unconditional (real) MSE is
//! estimated by Monte Carlo over channel and noise draws. The module also
//! provides the deterministic lower bound on the feedback-MMSE MSE (a
//! one-dimensional expectation over the exponential gain distribution,
//! evaluated by adaptive quadrature) and the ratio diagnostics for the
//! feedback MAP.
//!
//! Monte-Carlo runs use one derived random stream per trial index, write
//! each trial's contribution into a pre-allocated slot, and reduce the
//! slots in fixed trial order, so a run is bit-identical whether trials
//! execute serially or across any number of worker threads. Trial draws
//! depend only on `(seed, trial)` - never on the estimator, the feedback
//! count or the SNR - which gives every compared cell common random
//! numbers.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::channel::{disclose_gains, observe_pilots, sample_channel, SystemConfig};
use crate::error::{Error, Result};
use crate::estimators::{
    conditional_second_moment, map_classical, map_feedback, mmse_estimate, ConditionalSecondMoment,
    EstimatorKind,
};
use crate::quad;
use crate::rng;

/// User whose estimation error is reported.
///
/// Under the symmetric priors used throughout the experiments all users are
/// statistically identical, so results are reported for the first one.
pub const EVALUATION_USER: usize = 0;

/// Target on the reported quadrature error of [`mse_lower_bound`].
pub const LOWER_BOUND_TARGET_ERROR: f64 = 1e-8;

/// A Monte-Carlo MSE estimate with its normal-approximation standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseEstimate {
    /// Sample mean of the per-trial squared estimation error.
    pub mean: f64,
    /// Sample standard deviation divided by `sqrt(n_trials)`.
    pub std_error: f64,
    /// Number of independent trials averaged.
    pub n_trials: usize,
}

/// The deterministic lower bound on the feedback-MMSE MSE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBoundValue {
    /// Value of the bound.
    pub value: f64,
    /// Bound on the absolute quadrature error of `value`.
    pub quadrature_error: f64,
}

/// Closed-form conditional MSE of the shrinkage estimator under the given
/// second moments: `sum_i N0 * mu_i / (E * mu_i + N0)`.
pub fn conditional_mse(moment: &ConditionalSecondMoment, config: &SystemConfig) -> f64 {
    assert_eq!(
        moment.len(),
        config.n_antennas(),
        "moment vector and config disagree on antenna count"
    );
    let energy = config.pilot_energy();
    let noise = config.noise_power();
    moment
        .per_antenna()
        .iter()
        .map(|&mu| noise * mu / (energy * mu + noise))
        .sum()
}

/// Sum of squared coefficient errors between an estimate and the truth.
pub fn squared_error(estimate: &[Complex64], truth: &[Complex64]) -> f64 {
    assert_eq!(estimate.len(), truth.len());
    estimate
        .iter()
        .zip(truth)
        .map(|(e, t)| (e - t).norm_sqr())
        .sum()
}

/// Evaluates one trial: draws the channel and the pilot noise from streams
/// derived from `(seed, trial)`, then scores the estimator at every
/// feedback count in `m_grid` against the same draws.
fn trial_squared_errors(
    kind: EstimatorKind,
    m_grid: &[usize],
    config: &SystemConfig,
    seed: u64,
    trial: u64,
    out: &mut [f64],
) {
    let trial_seed = rng::derive_seed(seed, trial);
    let channel = sample_channel(config, rng::derive_seed(trial_seed, rng::STREAM_CHANNEL));
    let obs = observe_pilots(
        &channel,
        EVALUATION_USER,
        config,
        rng::derive_seed(trial_seed, rng::STREAM_PILOT_NOISE),
    )
    .expect("evaluation user is within range");
    let truth = channel.user_coefficients(EVALUATION_USER);
    let prior = config.prior_variances(EVALUATION_USER);

    for (slot, &m) in out.iter_mut().zip(m_grid) {
        let estimate = match kind {
            EstimatorKind::MmseClassical => {
                mmse_estimate(&obs, &ConditionalSecondMoment::from_prior(prior), config)
            }
            EstimatorKind::MapClassical => map_classical(&obs, config),
            EstimatorKind::MmseFeedback => {
                let disclosure = disclose_gains(&channel, EVALUATION_USER, m)
                    .expect("m validated against antenna count");
                mmse_estimate(&obs, &conditional_second_moment(&disclosure, prior), config)
            }
            EstimatorKind::MapFeedback => {
                let disclosure = disclose_gains(&channel, EVALUATION_USER, m)
                    .expect("m validated against antenna count");
                map_feedback(&obs, &disclosure, config)
            }
        };
        *slot = squared_error(estimate.values(), truth);
    }
}

/// Monte-Carlo MSE of one estimator at several feedback counts, sharing the
/// channel and noise draws across the whole `m_grid` (common random
/// numbers).
///
/// The training SNR is `snr_db` with the noise power fixed to 1; the
/// configured `pilot_energy`/`noise_power` are overridden accordingly.
/// Returns one estimate per entry of `m_grid`, in order.
pub fn empirical_mse_profile(
    kind: EstimatorKind,
    m_grid: &[usize],
    snr_db: f64,
    config: &SystemConfig,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<MseEstimate>> {
    assert!(n_trials >= 1, "n_trials must be at least 1");
    for &m in m_grid {
        if m > config.n_antennas() {
            return Err(Error::Range {
                what: "feedback count m",
                value: m,
                max: config.n_antennas(),
            });
        }
    }
    if m_grid.is_empty() {
        return Ok(Vec::new());
    }

    let cfg = config.at_snr_db(snr_db);
    let n_m = m_grid.len();
    let mut slots = vec![0.0f64; n_trials * n_m];
    slots
        .par_chunks_mut(n_m)
        .enumerate()
        .for_each(|(trial, out)| {
            trial_squared_errors(kind, m_grid, &cfg, seed, trial as u64, out);
        });

    // Fixed-order reduction over the slots; two passes keep the variance
    // computation well conditioned.
    let estimates = (0..n_m)
        .map(|k| {
            let mut sum = 0.0;
            for t in 0..n_trials {
                sum += slots[t * n_m + k];
            }
            let mean = sum / n_trials as f64;
            let std_error = if n_trials > 1 {
                let mut sq_dev = 0.0;
                for t in 0..n_trials {
                    let d = slots[t * n_m + k] - mean;
                    sq_dev += d * d;
                }
                (sq_dev / (n_trials as f64 - 1.0) / n_trials as f64).sqrt()
            } else {
                0.0
            };
            MseEstimate {
                mean,
                std_error,
                n_trials,
            }
        })
        .collect();
    Ok(estimates)
}

/// Monte-Carlo MSE of one estimator at a single feedback count.
pub fn empirical_mse(
    kind: EstimatorKind,
    m: usize,
    snr_db: f64,
    config: &SystemConfig,
    n_trials: usize,
    seed: u64,
) -> Result<MseEstimate> {
    let mut estimates = empirical_mse_profile(kind, &[m], snr_db, config, n_trials, seed)?;
    Ok(estimates.pop().expect("profile over one feedback count"))
}

/// Deterministic lower bound on the feedback-MMSE MSE for `user`:
/// `sum_i E_g[ N0 g / (E g + N0) ]` with `g` exponentially distributed with
/// mean equal to the prior variance of antenna `i`.
///
/// Each expectation is computed by adaptive quadrature after the change of
/// variables `u = exp(-g / variance)`, which maps the half-line onto
/// `(0, 1]` and absorbs the exponential weight:
/// `integral_0^1 N0 g(u) / (E g(u) + N0) du` with `g(u) = -variance ln u`.
/// The reported error is the sum of the per-antenna quadrature bounds and
/// is targeted at [`LOWER_BOUND_TARGET_ERROR`].
pub fn mse_lower_bound(config: &SystemConfig, user: usize) -> LowerBoundValue {
    assert!(user < config.n_users(), "user index out of range");
    let energy = config.pilot_energy();
    let noise = config.noise_power();
    let per_antenna_target = LOWER_BOUND_TARGET_ERROR / config.n_antennas() as f64;

    let mut value = 0.0;
    let mut quadrature_error = 0.0;
    for &variance in config.prior_variances(user) {
        if variance == 0.0 {
            // Degenerate prior: the gain is identically zero.
            continue;
        }
        let r = quad::integrate(
            |u: f64| {
                let g = -variance * u.ln();
                noise * g / (energy * g + noise)
            },
            0.0,
            1.0,
            per_antenna_target,
        );
        value += r.value;
        quadrature_error += r.error_bound;
    }
    LowerBoundValue {
        value,
        quadrature_error,
    }
}

/// Relative MSE reduction of `improved` over `baseline`, in percent.
/// Negative when the "improved" estimator is actually worse.
pub fn relative_reduction(baseline: &MseEstimate, improved: &MseEstimate) -> Result<f64> {
    if baseline.mean == 0.0 {
        return Err(Error::DivisionByZero("baseline MSE"));
    }
    Ok((baseline.mean - improved.mean) / baseline.mean * 100.0)
}

/// Empirical MSE ratio of the full-disclosure feedback MAP over the
/// classical MAP at the given SNR, with common random numbers.
///
/// The limits of this ratio are 2 at vanishing SNR and 1/2 at infinite SNR.
pub fn asymptotic_ratio(
    kind: EstimatorKind,
    snr_db: f64,
    config: &SystemConfig,
    n_trials: usize,
    seed: u64,
) -> Result<f64> {
    assert_eq!(
        kind,
        EstimatorKind::MapFeedback,
        "the asymptotic ratio is defined for the feedback MAP with full disclosure"
    );
    let m = config.n_antennas();
    let feedback = empirical_mse(kind, m, snr_db, config, n_trials, seed)?;
    let classical = empirical_mse(
        EstimatorKind::MapClassical,
        0,
        snr_db,
        config,
        n_trials,
        seed,
    )?;
    if classical.mean == 0.0 {
        return Err(Error::DivisionByZero("classical MAP MSE"));
    }
    Ok(feedback.mean / classical.mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Frozen oracle values for the per-antenna bound integral
    // int_0^inf g / (E g + 1) exp(-g) dg, from exponential-integral tables
    // (the closed form is (1/E) (1 - (1/E) exp(1/E) E1(1/E))).
    #[allow(clippy::excessive_precision)]
    const BOUND_UNIT_SNR: f64 = 0.403_652_637_676_805_93;
    const BOUND_ENERGY_10: f64 = 0.079_853_574_552_915_48;
    // Same integral with gain mean 2 at unit energy.
    #[allow(clippy::excessive_precision)]
    const BOUND_VAR_2: f64 = 0.538_544_683_758_134_77;

    fn identity_config(n: usize) -> SystemConfig {
        SystemConfig::identity_prior(n, 4, 1.0, 1.0).unwrap()
    }

    #[test]
    fn conditional_mse_single_antenna() {
        let cfg = SystemConfig::identity_prior(1, 1, 1.0, 1.0).unwrap();
        let m = ConditionalSecondMoment::from_prior(&[1.0]);
        assert_eq!(conditional_mse(&m, &cfg), 0.5);
    }

    #[test]
    fn conditional_mse_zero_moments() {
        let cfg = SystemConfig::identity_prior(3, 1, 2.0, 0.5).unwrap();
        let m = ConditionalSecondMoment::from_prior(&[0.0; 3]);
        assert_eq!(conditional_mse(&m, &cfg), 0.0);
    }

    #[test]
    fn conditional_mse_mixed_moments() {
        let cfg = identity_config(4);
        let m = ConditionalSecondMoment::from_prior(&[4.0, 0.25, 1.0, 1.0]);
        assert!((conditional_mse(&m, &cfg) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn classical_mse_matches_closed_form() {
        // Closed-form oracle: at 0 dB with unit priors each antenna
        // contributes 1/2, so the four-antenna MSE is 2.
        let cfg = identity_config(4);
        let est = empirical_mse(EstimatorKind::MmseClassical, 0, 0.0, &cfg, 100_000, 7).unwrap();
        assert!(
            (est.mean - 2.0).abs() < 3.0 * est.std_error,
            "mean = {} +- {}",
            est.mean,
            est.std_error
        );
    }

    #[test]
    fn feedback_mmse_with_no_feedback_is_classical_bitwise() {
        let cfg = identity_config(4);
        let a = empirical_mse(EstimatorKind::MmseFeedback, 0, 10.0, &cfg, 5_000, 3).unwrap();
        let b = empirical_mse(EstimatorKind::MmseClassical, 0, 10.0, &cfg, 5_000, 3).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn profile_matches_individual_cells() {
        let cfg = identity_config(4);
        let profile = empirical_mse_profile(
            EstimatorKind::MmseFeedback,
            &[0, 2, 4],
            0.0,
            &cfg,
            2_000,
            11,
        )
        .unwrap();
        for (k, &m) in [0usize, 2, 4].iter().enumerate() {
            let single =
                empirical_mse(EstimatorKind::MmseFeedback, m, 0.0, &cfg, 2_000, 11).unwrap();
            assert_eq!(profile[k].mean.to_bits(), single.mean.to_bits());
        }
    }

    #[test]
    fn runs_are_identical_across_thread_counts() {
        let cfg = identity_config(4);
        let run = || {
            empirical_mse_profile(
                EstimatorKind::MapFeedback,
                &[0, 1, 2, 3, 4],
                5.0,
                &cfg,
                4_000,
                21,
            )
            .unwrap()
        };
        let parallel = run();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run);
        for (p, s) in parallel.iter().zip(&serial) {
            assert_eq!(p.mean.to_bits(), s.mean.to_bits());
            assert_eq!(p.std_error.to_bits(), s.std_error.to_bits());
        }
    }

    #[test]
    fn map_feedback_low_snr_degradation() {
        // Full disclosure at -40 dB: the squared error doubles relative to
        // the prior MSE (sum of prior variances = 4).
        let cfg = identity_config(4);
        let est = empirical_mse(EstimatorKind::MapFeedback, 4, -40.0, &cfg, 100_000, 13).unwrap();
        let ratio = est.mean / 4.0;
        assert!(
            (1.9..=2.1).contains(&ratio),
            "degradation ratio = {ratio}, expected within [1.9, 2.1]"
        );
    }

    #[test]
    fn empirical_mse_rejects_m_beyond_antennas() {
        let cfg = identity_config(4);
        assert!(matches!(
            empirical_mse(EstimatorKind::MmseFeedback, 5, 0.0, &cfg, 10, 0),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn lower_bound_matches_table_oracle() {
        let cfg = identity_config(4);
        let bound = mse_lower_bound(&cfg, 0);
        assert!(
            (bound.value - 4.0 * BOUND_UNIT_SNR).abs() < 1e-6,
            "bound = {}, expected {}",
            bound.value,
            4.0 * BOUND_UNIT_SNR
        );
        assert!(bound.quadrature_error <= LOWER_BOUND_TARGET_ERROR);
    }

    #[test]
    fn lower_bound_at_energy_ten() {
        let cfg = identity_config(4).at_snr_db(10.0);
        let bound = mse_lower_bound(&cfg, 0);
        assert!((bound.value - 4.0 * BOUND_ENERGY_10).abs() < 1e-6);
    }

    #[test]
    fn lower_bound_with_nonunit_variance() {
        let cfg = SystemConfig::new(1, 1, 1.0, 1.0, vec![vec![2.0]]).unwrap();
        let bound = mse_lower_bound(&cfg, 0);
        assert!((bound.value - BOUND_VAR_2).abs() < 1e-6);
    }

    #[test]
    fn lower_bound_limits() {
        let cfg = identity_config(4);
        // Vanishing SNR: the estimate carries no information and the bound
        // approaches the prior MSE.
        let low = mse_lower_bound(&cfg.at_snr_db(-90.0), 0);
        assert!(
            (low.value - 4.0).abs() < 1e-3,
            "low-SNR bound = {}",
            low.value
        );
        // Infinite SNR: the bound vanishes.
        let high = mse_lower_bound(&cfg.at_snr_db(90.0), 0);
        assert!(
            high.value > 0.0 && high.value < 1e-6,
            "high-SNR bound = {}",
            high.value
        );
    }

    #[test]
    fn lower_bound_never_exceeds_prior_mse() {
        for snr_db in [-20.0, -5.0, 0.0, 5.0, 20.0] {
            let cfg = identity_config(4).at_snr_db(snr_db);
            let bound = mse_lower_bound(&cfg, 0);
            assert!(bound.value <= 4.0 + 1e-12);
        }
    }

    #[test]
    fn lower_bound_skips_degenerate_antennas() {
        let cfg = SystemConfig::new(2, 1, 1.0, 1.0, vec![vec![1.0, 0.0]]).unwrap();
        let bound = mse_lower_bound(&cfg, 0);
        assert!((bound.value - BOUND_UNIT_SNR).abs() < 1e-6);
    }

    #[test]
    fn relative_reduction_definition() {
        let b = MseEstimate {
            mean: 2.0,
            std_error: 0.0,
            n_trials: 1,
        };
        let i = MseEstimate {
            mean: 1.0,
            std_error: 0.0,
            n_trials: 1,
        };
        assert_eq!(relative_reduction(&b, &i).unwrap(), 50.0);
        assert_eq!(relative_reduction(&b, &b).unwrap(), 0.0);
    }

    #[test]
    fn relative_reduction_can_be_negative() {
        let b = MseEstimate {
            mean: 1.0,
            std_error: 0.0,
            n_trials: 1,
        };
        let i = MseEstimate {
            mean: 2.0,
            std_error: 0.0,
            n_trials: 1,
        };
        assert_eq!(relative_reduction(&b, &i).unwrap(), -100.0);
    }

    #[test]
    fn relative_reduction_rejects_zero_baseline() {
        let b = MseEstimate {
            mean: 0.0,
            std_error: 0.0,
            n_trials: 1,
        };
        assert!(matches!(
            relative_reduction(&b, &b),
            Err(Error::DivisionByZero(_))
        ));
    }

    #[test]
    fn asymptotic_ratio_is_finite_at_mid_snr() {
        let cfg = identity_config(4);
        let ratio = asymptotic_ratio(EstimatorKind::MapFeedback, 0.0, &cfg, 20_000, 5).unwrap();
        assert!(ratio.is_finite() && ratio > 0.0);
    }

    #[test]
    fn asymptotic_ratio_limits() {
        let cfg = identity_config(4);
        let low = asymptotic_ratio(EstimatorKind::MapFeedback, -40.0, &cfg, 20_000, 5).unwrap();
        assert!((1.9..=2.1).contains(&low), "low-SNR ratio = {low}");
        let high = asymptotic_ratio(EstimatorKind::MapFeedback, 40.0, &cfg, 20_000, 5).unwrap();
        assert!((0.45..=0.55).contains(&high), "high-SNR ratio = {high}");
    }

    #[test]
    fn squared_error_of_exact_estimate_is_zero() {
        let v = vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0)];
        assert_eq!(squared_error(&v, &v), 0.0);
    }

    #[test]
    fn conditional_moment_total_expectation() {
        // Law of total expectation: the Monte-Carlo MSE of the feedback
        // MMSE agrees with the average of the closed-form conditional MSE
        // over the disclosed moments.
        let cfg = identity_config(4).at_snr_db(0.0);
        let n_trials = 50_000u64;
        let mut diff_sum = 0.0;
        let mut diff_sq = 0.0;
        for trial in 0..n_trials {
            let trial_seed = rng::derive_seed(99, trial);
            let ch = sample_channel(&cfg, rng::derive_seed(trial_seed, rng::STREAM_CHANNEL));
            let obs = observe_pilots(
                &ch,
                EVALUATION_USER,
                &cfg,
                rng::derive_seed(trial_seed, rng::STREAM_PILOT_NOISE),
            )
            .unwrap();
            let disclosure = disclose_gains(&ch, EVALUATION_USER, 2).unwrap();
            let moment =
                conditional_second_moment(&disclosure, cfg.prior_variances(EVALUATION_USER));
            let est = mmse_estimate(&obs, &moment, &cfg);
            let d = squared_error(est.values(), ch.user_coefficients(EVALUATION_USER))
                - conditional_mse(&moment, &cfg);
            diff_sum += d;
            diff_sq += d * d;
        }
        let n = n_trials as f64;
        let mean = diff_sum / n;
        let se = ((diff_sq / n - mean * mean) / n).sqrt();
        assert!(
            mean.abs() <= 3.0 * se,
            "total-expectation gap = {mean} vs 3 SE = {}",
            3.0 * se
        );
    }
}
