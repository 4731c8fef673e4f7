//! Shared inputs for the criterion benches.

use chanest_core::SystemConfig;

/// The four-antenna, four-user identity-prior system the benches exercise.
pub fn bench_config() -> SystemConfig {
    SystemConfig::identity_prior(4, 4, 1.0, 1.0).expect("bench configuration is valid")
}
