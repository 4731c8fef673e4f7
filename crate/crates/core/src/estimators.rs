//! The four per-user channel estimators.
//!
//! Every estimator here is a per-antenna scalar rule applied to the pilot
//! observation `s`:
//!
//! * Bayesian shrinkage (both MMSE forms and the classical MAP):
//!   `h_hat = sqrt(E) * mu / (E * mu + N0) * s`, where `E` is the pilot
//!   energy, `N0` the noise power and `mu` the second moment of the
//!   coefficient given whatever is known. With no feedback `mu` is the
//!   prior variance; a disclosed gain replaces `mu` on that antenna.
//! * Modulus projection (the feedback MAP): on antennas with a disclosed
//!   gain `g`, `h_hat = sqrt(g) * s / |s|`, i.e. the known modulus carrying
//!   the observed phase; elsewhere the classical shrinkage rule.
//!
//! All multipliers are non-negative reals, so no estimator ever rotates the
//! phase of the observation. The classical MMSE and classical MAP rules are
//! one and the same formula and share one code path, which makes their
//! coincidence exact, bit for bit.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::channel::{GainDisclosure, PilotObservation, SystemConfig};
use crate::error::Error;

/// Which estimation rule produced (or should produce) an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// Bayesian shrinkage against the prior only.
    MmseClassical,
    /// Bayesian shrinkage with disclosed gains as second moments.
    MmseFeedback,
    /// Posterior maximization against the prior only; coincides with the
    /// classical MMSE.
    MapClassical,
    /// Posterior maximization under exact gain constraints (modulus
    /// projection on disclosed antennas).
    MapFeedback,
}

impl EstimatorKind {
    /// All four kinds, in canonical order.
    pub const ALL: [EstimatorKind; 4] = [
        EstimatorKind::MmseClassical,
        EstimatorKind::MmseFeedback,
        EstimatorKind::MapClassical,
        EstimatorKind::MapFeedback,
    ];

    /// Stable lowercase tag used in CSV output and on the command line.
    pub fn tag(self) -> &'static str {
        match self {
            EstimatorKind::MmseClassical => "mmse_classical",
            EstimatorKind::MmseFeedback => "mmse_feedback",
            EstimatorKind::MapClassical => "map_classical",
            EstimatorKind::MapFeedback => "map_feedback",
        }
    }

    /// True for the two rules that consume gain disclosures.
    pub fn uses_feedback(self) -> bool {
        matches!(
            self,
            EstimatorKind::MmseFeedback | EstimatorKind::MapFeedback
        )
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::UnknownEstimator(s.to_string()))
    }
}

/// A channel estimate for one user, tagged with the rule that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    values: Vec<Complex64>,
    estimator: EstimatorKind,
}

impl ChannelEstimate {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn estimator(&self) -> EstimatorKind {
        self.estimator
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-antenna second moment of the channel coefficient given the feedback:
/// the disclosed gain where one is known, the prior variance elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalSecondMoment {
    per_antenna: Vec<f64>,
    disclosed: usize,
}

impl ConditionalSecondMoment {
    /// Moment vector of the no-feedback case: the prior variances.
    pub fn from_prior(prior_variances: &[f64]) -> Self {
        Self {
            per_antenna: prior_variances.to_vec(),
            disclosed: 0,
        }
    }

    pub fn per_antenna(&self) -> &[f64] {
        &self.per_antenna
    }

    /// How many entries come from disclosed gains.
    pub fn disclosed_count(&self) -> usize {
        self.disclosed
    }

    pub fn len(&self) -> usize {
        self.per_antenna.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_antenna.is_empty()
    }
}

/// Combines a gain disclosure with the prior: disclosed antennas take their
/// exact gain as second moment, the rest keep the prior variance.
pub fn conditional_second_moment(
    disclosure: &GainDisclosure,
    prior_variances: &[f64],
) -> ConditionalSecondMoment {
    let mut per_antenna = prior_variances.to_vec();
    for &(index, gain) in disclosure.entries() {
        assert!(
            index < per_antenna.len(),
            "disclosed antenna {index} out of range for {} antennas",
            per_antenna.len()
        );
        per_antenna[index] = gain;
    }
    ConditionalSecondMoment {
        per_antenna,
        disclosed: disclosure.len(),
    }
}

/// The shared shrinkage kernel: `sqrt(E) * mu / (E * mu + N0)` per antenna.
///
/// `N0 > 0` keeps the denominator positive for any `mu >= 0`; a zero moment
/// pins the estimate to zero.
fn shrinkage_values(
    obs: &PilotObservation,
    moments: &[f64],
    config: &SystemConfig,
) -> Vec<Complex64> {
    let energy = config.pilot_energy();
    let noise = config.noise_power();
    let amplitude = energy.sqrt();
    obs.samples()
        .iter()
        .zip(moments)
        .map(|(&s, &mu)| s * (amplitude * mu / (energy * mu + noise)))
        .collect()
}

/// Bayesian shrinkage estimate under the given conditional second moments.
///
/// With a prior-only moment vector this is the classical rule; with
/// disclosed gains it is the feedback-conditioned rule. The estimate is
/// tagged accordingly.
pub fn mmse_estimate(
    obs: &PilotObservation,
    moment: &ConditionalSecondMoment,
    config: &SystemConfig,
) -> ChannelEstimate {
    assert_eq!(
        obs.len(),
        config.n_antennas(),
        "observation and config disagree on antenna count"
    );
    assert_eq!(
        moment.len(),
        config.n_antennas(),
        "moment vector and config disagree on antenna count"
    );
    let estimator = if moment.disclosed_count() > 0 {
        EstimatorKind::MmseFeedback
    } else {
        EstimatorKind::MmseClassical
    };
    ChannelEstimate {
        values: shrinkage_values(obs, moment.per_antenna(), config),
        estimator,
    }
}

/// Classical posterior-maximizing estimate (no feedback). Shares the
/// shrinkage kernel with [`mmse_estimate`], so the two coincide exactly.
pub fn map_classical(obs: &PilotObservation, config: &SystemConfig) -> ChannelEstimate {
    assert_eq!(
        obs.len(),
        config.n_antennas(),
        "observation and config disagree on antenna count"
    );
    assert!(
        obs.user() < config.n_users(),
        "observation user out of range"
    );
    ChannelEstimate {
        values: shrinkage_values(obs, config.prior_variances(obs.user()), config),
        estimator: EstimatorKind::MapClassical,
    }
}

/// Posterior-maximizing estimate under exact gain constraints.
///
/// On a disclosed antenna the posterior is maximized on the circle of the
/// known modulus, at the phase of the observation: `sqrt(g) * s / |s|`.
/// Undisclosed antennas fall back to the classical rule. When `s = 0` (a
/// probability-zero event under the continuous noise model) the phase
/// factor is taken to be 1, so the estimate is the real value `sqrt(g)`.
pub fn map_feedback(
    obs: &PilotObservation,
    disclosure: &GainDisclosure,
    config: &SystemConfig,
) -> ChannelEstimate {
    assert_eq!(
        obs.len(),
        config.n_antennas(),
        "observation and config disagree on antenna count"
    );
    assert!(
        obs.user() < config.n_users(),
        "observation user out of range"
    );
    assert_eq!(
        disclosure.user(),
        obs.user(),
        "disclosure and observation belong to different users"
    );
    let classical = shrinkage_values(obs, config.prior_variances(obs.user()), config);
    let values = obs
        .samples()
        .iter()
        .enumerate()
        .map(|(i, &s)| match disclosure.gain(i) {
            Some(gain) => {
                let modulus = s.norm();
                let phase = if modulus == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    s / modulus
                };
                phase * gain.sqrt()
            }
            None => classical[i],
        })
        .collect();
    let estimator = if disclosure.is_empty() {
        EstimatorKind::MapClassical
    } else {
        EstimatorKind::MapFeedback
    };
    ChannelEstimate { values, estimator }
}
