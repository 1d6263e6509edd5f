use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use esbandit::gbt::{train_fixed_rounds, TrainConfig};
use esbandit::policies::{falcon_distribution, sample_action};
use esbandit::runner::run_epoch;
use esbandit::two_arm::{allocation_prob_exhaustive, allocation_prob_montecarlo, ts_allocation_prob, DEFAULT_ETA};
use esbandit::{rng_from_seed, PolicyConfig, TwoArmCounts};
use esbandit_bench::burn_in_fixture;

fn two_arm(c: &mut Criterion) {
    let counts = TwoArmCounts::new(60, 100, 50, 100).unwrap();
    c.bench_function("two_arm/exhaustive_100", |b| {
        b.iter(|| allocation_prob_exhaustive(black_box(&counts), DEFAULT_ETA).unwrap())
    });
    c.bench_function("two_arm/montecarlo_10k", |b| {
        b.iter(|| allocation_prob_montecarlo(black_box(&counts), DEFAULT_ETA, 10_000, 1).unwrap())
    });
    c.bench_function("two_arm/thompson_10k", |b| {
        b.iter(|| ts_allocation_prob(black_box(&counts), 1.0, 1.0, 10_000, 1).unwrap())
    });
}

fn policies(c: &mut Criterion) {
    let estimates: Vec<f64> = (0..18).map(|i| (i as f64 * 0.7).sin().abs()).collect();
    let mut rng = rng_from_seed(3);
    c.bench_function("policies/falcon_sample_18", |b| {
        b.iter(|| sample_action(&falcon_distribution(black_box(&estimates), 40.0).unwrap(), &mut rng))
    });
}

fn epoch(c: &mut Criterion) {
    let (env, buffer) = burn_in_fixture(1000, 4);
    let model = train_fixed_rounds(&buffer.to_dataset(&env).unwrap(), &TrainConfig::default(), 30).unwrap();
    c.bench_function("runner/epoch_100_rounds", |b| {
        b.iter_batched(
            || (buffer.clone(), rng_from_seed(5)),
            |(mut buf, mut rng)| {
                run_epoch(&env, 0, &model, 1e-6, &mut PolicyConfig::greedy(), &mut buf, 100, &mut rng).unwrap()
            },
            criterion::BatchSize::LargeInput,
        )
    });
}

criterion_group!(benches, two_arm, policies, epoch);
criterion_main!(benches);
