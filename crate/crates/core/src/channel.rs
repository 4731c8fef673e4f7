//! System configuration and the random quantities of one training round:
//! channel realizations, pilot observations, receive-power (RSSI) samples
//! and gain disclosures.
//!
//! All sampling operations are pure functions of `(inputs, seed)` and can be
//! invoked concurrently; random streams are constructed per call and never
//! shared.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng;

/// Static parameters of the downlink system under study.
///
/// `pilot_energy` is the combined training factor (pilot symbol count times
/// symbol power) scaling the channel inside a pilot observation, and
/// `noise_power` is the receiver noise variance, so the training SNR is
/// `pilot_energy / noise_power`. The channel coefficient of antenna `i`
/// towards user `j` has a circularly-symmetric complex Gaussian prior with
/// variance `prior_variances[j][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    n_antennas: usize,
    n_users: usize,
    pilot_energy: f64,
    noise_power: f64,
    prior_variances: Vec<Vec<f64>>,
    frame_slots: Option<u32>,
    symbols_per_slot: Option<u32>,
}

impl SystemConfig {
    /// Validates and builds a configuration.
    ///
    /// `prior_variances` must hold one row of `n_antennas` non-negative
    /// entries per user. A zero prior variance pins the corresponding
    /// coefficient to zero (degenerate prior); the energy and noise scalars
    /// must be strictly positive.
    pub fn new(
        n_antennas: usize,
        n_users: usize,
        pilot_energy: f64,
        noise_power: f64,
        prior_variances: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if n_antennas == 0 {
            return Err(Error::InvalidConfig("n_antennas must be positive".into()));
        }
        if n_users == 0 {
            return Err(Error::InvalidConfig("n_users must be positive".into()));
        }
        if !(pilot_energy > 0.0 && pilot_energy.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "pilot_energy must be positive and finite, got {pilot_energy}"
            )));
        }
        if !(noise_power > 0.0 && noise_power.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise_power must be positive and finite, got {noise_power}"
            )));
        }
        if prior_variances.len() != n_users {
            return Err(Error::InvalidConfig(format!(
                "prior_variances has {} rows, expected one per user ({n_users})",
                prior_variances.len()
            )));
        }
        for (user, row) in prior_variances.iter().enumerate() {
            if row.len() != n_antennas {
                return Err(Error::InvalidConfig(format!(
                    "prior_variances row {user} has {} entries, expected {n_antennas}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(Error::InvalidConfig(format!(
                    "prior variance must be finite and non-negative, got {bad}"
                )));
            }
        }
        Ok(Self {
            n_antennas,
            n_users,
            pilot_energy,
            noise_power,
            prior_variances,
            frame_slots: None,
            symbols_per_slot: None,
        })
    }

    /// Configuration with unit prior variance on every coefficient.
    pub fn identity_prior(
        n_antennas: usize,
        n_users: usize,
        pilot_energy: f64,
        noise_power: f64,
    ) -> Result<Self> {
        Self::new(
            n_antennas,
            n_users,
            pilot_energy,
            noise_power,
            vec![vec![1.0; n_antennas]; n_users],
        )
    }

    /// Attaches frame-layout metadata (slots per frame, symbols per slot).
    ///
    /// The frame layout plays no role in estimation; it is carried only so
    /// experiment records can describe the system they model.
    pub fn with_frame_metadata(mut self, frame_slots: u32, symbols_per_slot: u32) -> Self {
        self.frame_slots = Some(frame_slots);
        self.symbols_per_slot = Some(symbols_per_slot);
        self
    }

    /// Same dimensions and prior, with `noise_power = 1` and `pilot_energy`
    /// set so the training SNR equals `snr_db`.
    pub fn at_snr_db(&self, snr_db: f64) -> Self {
        let mut cfg = self.clone();
        cfg.noise_power = 1.0;
        cfg.pilot_energy = 10f64.powf(snr_db / 10.0);
        cfg
    }

    pub fn n_antennas(&self) -> usize {
        self.n_antennas
    }

    pub fn n_users(&self) -> usize {
        self.n_users
    }

    pub fn pilot_energy(&self) -> f64 {
        self.pilot_energy
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    /// Training SNR in dB.
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.pilot_energy / self.noise_power).log10()
    }

    /// Prior variance row of `user`.
    pub fn prior_variances(&self, user: usize) -> &[f64] {
        &self.prior_variances[user]
    }

    /// All prior variance rows, one per user.
    pub fn prior_variance_rows(&self) -> &[Vec<f64>] {
        &self.prior_variances
    }

    pub fn frame_slots(&self) -> Option<u32> {
        self.frame_slots
    }

    pub fn symbols_per_slot(&self) -> Option<u32> {
        self.symbols_per_slot
    }
}

/// One draw of the channel: complex coefficients per (user, antenna) and
/// their squared moduli (the channel gains).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    coefficients: Vec<Vec<Complex64>>,
    gains: Vec<Vec<f64>>,
}

impl ChannelRealization {
    /// Builds a realization from raw coefficients; gains are computed as
    /// the squared moduli, which keeps the two fields consistent by
    /// construction.
    pub fn from_coefficients(coefficients: Vec<Vec<Complex64>>) -> Self {
        let gains = coefficients
            .iter()
            .map(|row| row.iter().map(|h| h.norm_sqr()).collect())
            .collect();
        Self {
            coefficients,
            gains,
        }
    }

    pub fn n_users(&self) -> usize {
        self.coefficients.len()
    }

    pub fn n_antennas(&self) -> usize {
        self.coefficients.first().map_or(0, Vec::len)
    }

    /// Coefficient vector of `user`.
    pub fn user_coefficients(&self, user: usize) -> &[Complex64] {
        &self.coefficients[user]
    }

    /// Gain vector of `user`.
    pub fn user_gains(&self, user: usize) -> &[f64] {
        &self.gains[user]
    }
}

/// Noisy training observation of one user's channel vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotObservation {
    user: usize,
    samples: Vec<Complex64>,
}

impl PilotObservation {
    /// Wraps raw observation samples for `user`.
    pub fn new(user: usize, samples: Vec<Complex64>) -> Self {
        Self { user, samples }
    }

    pub fn user(&self) -> usize {
        self.user
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Per-antenna transmit powers over a run of data slots.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    per_slot_powers: Vec<Vec<f64>>,
}

impl PowerAllocation {
    /// Validates a power schedule: every entry non-negative and finite,
    /// all rows the same length, and at least one positive entry per slot
    /// (a silent slot produces no usable receive-power sample).
    pub fn new(per_slot_powers: Vec<Vec<f64>>) -> Result<Self> {
        let width = per_slot_powers.first().map_or(0, Vec::len);
        for (slot, row) in per_slot_powers.iter().enumerate() {
            if row.len() != width {
                return Err(Error::Dimension(format!(
                    "power allocation slot {slot} has {} entries, expected {width}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
                return Err(Error::InvalidConfig(format!(
                    "transmit power must be finite and non-negative, got {bad}"
                )));
            }
            if !row.iter().any(|&p| p > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "power allocation slot {slot} is all zero"
                )));
            }
        }
        Ok(Self { per_slot_powers })
    }

    /// Number of slots in the schedule.
    pub fn n_slots(&self) -> usize {
        self.per_slot_powers.len()
    }

    /// Number of antennas each slot allocates power to.
    pub fn n_antennas(&self) -> usize {
        self.per_slot_powers.first().map_or(0, Vec::len)
    }

    pub fn slot(&self, n: usize) -> &[f64] {
        &self.per_slot_powers[n]
    }
}

/// Receive-power samples observed by one user, one per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct RssiSequence {
    values: Vec<f64>,
}

impl RssiSequence {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The set of antenna indices whose gains a user has reconstructed from
/// receive-power feedback, with the exact gain values.
#[derive(Debug, Clone, PartialEq)]
pub struct GainDisclosure {
    user: usize,
    entries: Vec<(usize, f64)>,
}

impl GainDisclosure {
    /// Disclosure with no known gains (the no-feedback case).
    pub fn empty(user: usize) -> Self {
        Self {
            user,
            entries: Vec::new(),
        }
    }

    pub fn user(&self) -> usize {
        self.user
    }

    /// Number of disclosed gains.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The disclosed gain of antenna `index`, if it is in the set.
    pub fn gain(&self, index: usize) -> Option<f64> {
        self.entries
            .binary_search_by_key(&index, |e| e.0)
            .ok()
            .map(|k| self.entries[k].1)
    }

    /// Disclosed `(antenna index, gain)` pairs in ascending index order.
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }
}

/// Draws one channel realization from the configured prior.
///
/// Each coefficient is circularly-symmetric complex Gaussian: real and
/// imaginary parts are independent normals with variance half the prior
/// variance, so the expected gain equals the prior variance. The draw is a
/// pure function of `(config, seed)`; two normals are consumed per
/// coefficient even when its variance is zero, so stream positions do not
/// depend on the prior.
pub fn sample_channel(config: &SystemConfig, seed: u64) -> ChannelRealization {
    let mut rng = rng::rng_from_seed(seed);
    let coefficients = config
        .prior_variance_rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|&variance| {
                    let scale = (variance / 2.0).sqrt();
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();
    ChannelRealization::from_coefficients(coefficients)
}

/// Observes the training pilots at `user`: the channel scaled by the square
/// root of the pilot energy, plus circularly-symmetric complex noise of
/// variance `noise_power`.
pub fn observe_pilots(
    channel: &ChannelRealization,
    user: usize,
    config: &SystemConfig,
    seed: u64,
) -> Result<PilotObservation> {
    if user >= config.n_users() || user >= channel.n_users() {
        return Err(Error::Dimension(format!(
            "user index {user} out of range for {} users",
            config.n_users().min(channel.n_users())
        )));
    }
    if channel.n_antennas() != config.n_antennas() {
        return Err(Error::Dimension(format!(
            "channel has {} antennas, config has {}",
            channel.n_antennas(),
            config.n_antennas()
        )));
    }
    let mut rng = rng::rng_from_seed(seed);
    let amplitude = config.pilot_energy().sqrt();
    let noise_scale = (config.noise_power() / 2.0).sqrt();
    let samples = channel
        .user_coefficients(user)
        .iter()
        .map(|&h| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            amplitude * h + Complex64::new(re * noise_scale, im * noise_scale)
        })
        .collect();
    Ok(PilotObservation::new(user, samples))
}

/// Computes the receive-power sample sequence seen by `user` under a power
/// schedule: for each slot, the gain-weighted sum of transmit powers plus
/// the noise floor. The feedback itself is noiseless.
pub fn compute_rssi(
    channel: &ChannelRealization,
    user: usize,
    allocation: &PowerAllocation,
    config: &SystemConfig,
) -> Result<RssiSequence> {
    if user >= config.n_users() || user >= channel.n_users() {
        return Err(Error::Dimension(format!(
            "user index {user} out of range for {} users",
            config.n_users().min(channel.n_users())
        )));
    }
    if allocation.n_slots() > 0 && allocation.n_antennas() != config.n_antennas() {
        return Err(Error::Dimension(format!(
            "power allocation covers {} antennas, config has {}",
            allocation.n_antennas(),
            config.n_antennas()
        )));
    }
    let gains = channel.user_gains(user);
    let values = (0..allocation.n_slots())
        .map(|n| {
            let weighted: f64 = gains
                .iter()
                .zip(allocation.slot(n))
                .map(|(g, p)| g * p)
                .sum();
            weighted + config.noise_power()
        })
        .collect();
    Ok(RssiSequence { values })
}

/// Discloses the first `m` channel gains of `user`, exactly as realized.
///
/// Feedback is consumed in natural antenna order: `m` receive-power samples
/// reconstruct the gains of antennas `0..m`. The inversion of the power
/// samples themselves is not modelled; each feedback is assumed to yield
/// one gain perfectly.
pub fn disclose_gains(
    channel: &ChannelRealization,
    user: usize,
    m: usize,
) -> Result<GainDisclosure> {
    if user >= channel.n_users() {
        return Err(Error::Dimension(format!(
            "user index {user} out of range for {} users",
            channel.n_users()
        )));
    }
    let n = channel.n_antennas();
    if m > n {
        return Err(Error::Range {
            what: "feedback count m",
            value: m,
            max: n,
        });
    }
    let entries = channel.user_gains(user)[..m]
        .iter()
        .copied()
        .enumerate()
        .collect();
    Ok(GainDisclosure { user, entries })
}
