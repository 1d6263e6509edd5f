use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use esbandit::gbt::{fit_tree, train_early_stopping, train_fixed_rounds, TrainConfig};
use esbandit_bench::burn_in_dataset;

fn tree_fit(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit_tree");
    for rows in [1000, 4500] {
        let data = burn_in_dataset(rows, 1);
        let mean = data.mean_reward().unwrap();
        let residuals: Vec<f64> = data.rewards().iter().map(|r| r - mean).collect();
        group.bench_with_input(BenchmarkId::from_parameter(rows), &data, |b, data| {
            b.iter(|| fit_tree(black_box(data), &residuals, 3, 5).unwrap())
        });
    }
    group.finish();
}

fn boosting(c: &mut Criterion) {
    let data = burn_in_dataset(4500, 2);
    let cfg = TrainConfig::default();
    c.bench_function("train_fixed_rounds/30", |b| b.iter(|| train_fixed_rounds(black_box(&data), &cfg, 30).unwrap()));
    c.bench_function("train_early_stopping", |b| b.iter(|| train_early_stopping(black_box(&data), &cfg).unwrap()));
}

criterion_group!(benches, tree_fit, boosting);
criterion_main!(benches);
