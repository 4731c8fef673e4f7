use criterion::{black_box, criterion_group, criterion_main, Criterion};

use chanest_bench::bench_config;
use chanest_core::{
    conditional_second_moment, disclose_gains, map_classical, map_feedback, mmse_estimate,
    mse_lower_bound, observe_pilots, sample_channel, ConditionalSecondMoment,
};

fn estimator_kernels(c: &mut Criterion) {
    let config = bench_config().at_snr_db(0.0);
    let channel = sample_channel(&config, 42);
    let obs = observe_pilots(&channel, 0, &config, 43).unwrap();
    let disclosure = disclose_gains(&channel, 0, 2).unwrap();
    let prior = config.prior_variances(0);
    let prior_moment = ConditionalSecondMoment::from_prior(prior);
    let feedback_moment = conditional_second_moment(&disclosure, prior);

    let mut group = c.benchmark_group("estimators");
    group.bench_function("mmse_classical", |b| {
        b.iter(|| mmse_estimate(black_box(&obs), black_box(&prior_moment), &config))
    });
    group.bench_function("mmse_feedback", |b| {
        b.iter(|| mmse_estimate(black_box(&obs), black_box(&feedback_moment), &config))
    });
    group.bench_function("map_classical", |b| {
        b.iter(|| map_classical(black_box(&obs), &config))
    });
    group.bench_function("map_feedback", |b| {
        b.iter(|| map_feedback(black_box(&obs), black_box(&disclosure), &config))
    });
    group.finish();
}

fn sampling(c: &mut Criterion) {
    let config = bench_config().at_snr_db(0.0);
    c.bench_function("sample_channel", |b| {
        let mut seed = 0u64;
        b.iter(|| {
            seed = seed.wrapping_add(1);
            sample_channel(black_box(&config), seed)
        })
    });
}

fn lower_bound(c: &mut Criterion) {
    let config = bench_config().at_snr_db(0.0);
    c.bench_function("mse_lower_bound", |b| {
        b.iter(|| mse_lower_bound(black_box(&config), 0))
    });
}

criterion_group!(benches, estimator_kernels, sampling, lower_bound);
criterion_main!(benches);
