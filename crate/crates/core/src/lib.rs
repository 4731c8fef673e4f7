//! Simulation library for MIMO downlink channel estimation aided by
//! receive-power (RSSI) feedback.
//!
//! A base station trains `N` antennas towards single-antenna users and, on
//! top of the usual pilot observations, learns exact channel gains from
//! receive-power feedback samples. The crate provides:
//!
//! * [`channel`] - system configuration, seeded channel/pilot/RSSI
//!   sampling and gain disclosure;
//! * [`estimators`] - the classical and feedback-conditioned MMSE and MAP
//!   rules;
//! * [`metrics`] - closed-form conditional MSE, Monte-Carlo MSE with
//!   reproducible parallel trials, the deterministic MSE lower bound and
//!   ratio diagnostics;
//! * [`experiment`] - (SNR, feedback count, estimator) sweeps and their
//!   CSV/metadata serialization;
//! * [`verify`] - statistical self-checks of the analytic guarantees.
//!
//! Everything is deterministic given a master seed: random streams are
//! derived per trial index ([`rng`]), and Monte-Carlo reductions run in
//! fixed trial order, so results are bit-identical across thread counts.
//!
//! # Example
//!
//! Two disclosed gains shrink the estimation error of the MMSE rule:
//!
//! ```
//! use chanest_core::{empirical_mse, EstimatorKind, SystemConfig};
//!
//! let config = SystemConfig::identity_prior(4, 4, 1.0, 1.0)?;
//! let classical =
//!     empirical_mse(EstimatorKind::MmseClassical, 0, 0.0, &config, 10_000, 7)?;
//! let with_feedback =
//!     empirical_mse(EstimatorKind::MmseFeedback, 2, 0.0, &config, 10_000, 7)?;
//! assert!(with_feedback.mean < classical.mean);
//! # Ok::<(), chanest_core::Error>(())
//! ```

pub mod channel;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod metrics;
pub mod quad;
pub mod rng;
pub mod verify;

pub use channel::{
    compute_rssi, disclose_gains, observe_pilots, sample_channel, ChannelRealization,
    GainDisclosure, PilotObservation, PowerAllocation, RssiSequence, SystemConfig,
};
pub use error::{Error, Result};
pub use estimators::{
    conditional_second_moment, map_classical, map_feedback, mmse_estimate, ChannelEstimate,
    ConditionalSecondMoment, EstimatorKind,
};
pub use experiment::{emit_report, run_sweep, ReportMetadata, SweepCell, SweepReport, SweepSpec};
pub use metrics::{
    asymptotic_ratio, conditional_mse, empirical_mse, empirical_mse_profile, mse_lower_bound,
    relative_reduction, LowerBoundValue, MseEstimate,
};
pub use verify::{CheckOutcome, VerifyOptions};
