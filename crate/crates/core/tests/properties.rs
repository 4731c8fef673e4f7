//! Property tests over the sampling and estimation rules.

use num_complex::Complex64;
use proptest::prelude::*;

use chanest_core::{
    compute_rssi, conditional_second_moment, disclose_gains, map_classical, map_feedback,
    mmse_estimate, observe_pilots, sample_channel, ConditionalSecondMoment, EstimatorKind,
    PilotObservation, PowerAllocation, SystemConfig,
};

fn complex_strategy() -> impl Strategy<Value = Complex64> {
    (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn config_strategy() -> impl Strategy<Value = SystemConfig> {
    (1usize..=8, 1usize..=4, 1e-3f64..1e3, 1e-3f64..1e3).prop_flat_map(|(n, k, energy, noise)| {
        proptest::collection::vec(proptest::collection::vec(0.0f64..10.0, n), k)
            .prop_map(move |prior| SystemConfig::new(n, k, energy, noise, prior).unwrap())
    })
}

proptest! {
    #[test]
    fn sampling_is_deterministic(config in config_strategy(), seed: u64) {
        let a = sample_channel(&config, seed);
        let b = sample_channel(&config, seed);
        prop_assert_eq!(&a, &b);
        let oa = observe_pilots(&a, 0, &config, seed ^ 1).unwrap();
        let ob = observe_pilots(&b, 0, &config, seed ^ 1).unwrap();
        prop_assert_eq!(oa, ob);
    }

    #[test]
    fn disclosed_gains_are_exact_copies(config in config_strategy(), seed: u64, m_frac in 0.0f64..=1.0) {
        let channel = sample_channel(&config, seed);
        let n = config.n_antennas();
        let m = ((n as f64 + 1.0) * m_frac) as usize % (n + 1);
        let disclosure = disclose_gains(&channel, 0, m).unwrap();
        prop_assert_eq!(disclosure.len(), m);
        for &(index, gain) in disclosure.entries() {
            prop_assert_eq!(gain.to_bits(), channel.user_gains(0)[index].to_bits());
        }
    }

    #[test]
    fn rssi_is_exact_on_integer_inputs(
        moduli in proptest::collection::vec(0u64..1000, 1..16),
        powers in proptest::collection::vec(1u64..1000, 1..16),
    ) {
        // Integer moduli square and accumulate exactly in f64 (everything
        // stays far below 2^53), so the receive power must equal an
        // independent integer-arithmetic evaluation bit for bit.
        let n = moduli.len().min(powers.len());
        let moduli = &moduli[..n];
        let powers = &powers[..n];
        let config = SystemConfig::identity_prior(n, 1, 1.0, 1.0).unwrap();
        let channel = chanest_core::ChannelRealization::from_coefficients(vec![moduli
            .iter()
            .map(|&k| Complex64::new(k as f64, 0.0))
            .collect()]);
        let allocation =
            PowerAllocation::new(vec![powers.iter().map(|&p| p as f64).collect()]).unwrap();
        let rssi = compute_rssi(&channel, 0, &allocation, &config).unwrap();
        let expected: u64 = moduli.iter().zip(powers).map(|(&k, &p)| k * k * p).sum();
        prop_assert_eq!(rssi.values()[0].to_bits(), (expected as f64 + 1.0).to_bits());
    }

    #[test]
    fn rssi_matches_compensated_sum(config in config_strategy(), seed: u64) {
        let channel = sample_channel(&config, seed);
        let n = config.n_antennas();
        let powers: Vec<f64> = (0..n).map(|i| 0.5 + i as f64).collect();
        let allocation = PowerAllocation::new(vec![powers.clone()]).unwrap();
        let rssi = compute_rssi(&channel, 0, &allocation, &config).unwrap();
        // Kahan-compensated reference.
        let mut sum = 0.0f64;
        let mut c = 0.0f64;
        for (g, p) in channel.user_gains(0).iter().zip(&powers) {
            let y = g * p - c;
            let t = sum + y;
            c = (t - sum) - y;
            sum = t;
        }
        let reference = sum + config.noise_power();
        let tolerance = (n as f64) * f64::EPSILON * reference.abs();
        prop_assert!((rssi.values()[0] - reference).abs() <= tolerance);
    }

    #[test]
    fn map_feedback_modulus_is_exact(
        samples in proptest::collection::vec(complex_strategy(), 4),
        seed: u64,
        m in 0usize..=4,
    ) {
        let config = SystemConfig::identity_prior(4, 1, 2.0, 0.5).unwrap();
        let channel = sample_channel(&config, seed);
        let disclosure = disclose_gains(&channel, 0, m).unwrap();
        let obs = PilotObservation::new(0, samples);
        let estimate = map_feedback(&obs, &disclosure, &config);
        for &(index, gain) in disclosure.entries() {
            let modulus = estimate.values()[index].norm();
            prop_assert!(
                (modulus - gain.sqrt()).abs() <= 4.0 * f64::EPSILON * (1.0 + gain.sqrt()),
                "|estimate| = {} vs sqrt(gain) = {}", modulus, gain.sqrt()
            );
        }
    }

    #[test]
    fn estimators_preserve_observation_phase(
        samples in proptest::collection::vec(complex_strategy(), 4),
        seed: u64,
        m in 0usize..=4,
    ) {
        // Every multiplier is a non-negative real, so the estimate times
        // the conjugate observation must be (numerically) real and >= 0.
        let config = SystemConfig::identity_prior(4, 1, 2.0, 0.5).unwrap();
        let channel = sample_channel(&config, seed);
        let disclosure = disclose_gains(&channel, 0, m).unwrap();
        let obs = PilotObservation::new(0, samples.clone());
        let prior = config.prior_variances(0);
        let estimates = [
            mmse_estimate(&obs, &ConditionalSecondMoment::from_prior(prior), &config),
            mmse_estimate(&obs, &conditional_second_moment(&disclosure, prior), &config),
            map_classical(&obs, &config),
            map_feedback(&obs, &disclosure, &config),
        ];
        for estimate in &estimates {
            for (value, s) in estimate.values().iter().zip(&samples) {
                if s.norm() == 0.0 {
                    continue;
                }
                let aligned = value * s.conj();
                prop_assert!(aligned.im.abs() <= 1e-12 * value.norm() * s.norm() + 1e-300);
                prop_assert!(aligned.re >= -1e-12);
            }
        }
    }

    #[test]
    fn mmse_is_linear_in_the_observation(
        samples in proptest::collection::vec(complex_strategy(), 4),
        scale in complex_strategy(),
    ) {
        let config = SystemConfig::identity_prior(4, 1, 2.0, 0.5).unwrap();
        let moment = ConditionalSecondMoment::from_prior(config.prior_variances(0));
        let base = mmse_estimate(&PilotObservation::new(0, samples.clone()), &moment, &config);
        let scaled_samples: Vec<Complex64> = samples.iter().map(|s| scale * s).collect();
        let scaled = mmse_estimate(&PilotObservation::new(0, scaled_samples), &moment, &config);
        for (b, s) in base.values().iter().zip(scaled.values()) {
            let expected = scale * b;
            prop_assert!(
                (s - expected).norm() <= 1e-12 * expected.norm() + 1e-300,
                "scaled estimate {} vs expected {}", s, expected
            );
        }
    }

    #[test]
    fn classical_estimators_coincide(config in config_strategy(), seed: u64) {
        let channel = sample_channel(&config, seed);
        let obs = observe_pilots(&channel, 0, &config, seed ^ 0x55aa).unwrap();
        let mmse = mmse_estimate(
            &obs,
            &ConditionalSecondMoment::from_prior(config.prior_variances(0)),
            &config,
        );
        let map = map_classical(&obs, &config);
        prop_assert_eq!(mmse.values(), map.values());
        prop_assert_eq!(mmse.estimator(), EstimatorKind::MmseClassical);
        prop_assert_eq!(map.estimator(), EstimatorKind::MapClassical);
    }
}
