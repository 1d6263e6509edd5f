use esbandit::gbt::{
    fit_tree, split_train_val, train_early_stopping, train_fixed_rounds, train_with_validation, Dataset, LossMetric,
    Node, TrainConfig,
};
use proptest::prelude::*;

fn rows(data: &[(f64, f64)]) -> Dataset {
    let mut d = Dataset::new(1);
    for &(x, r) in data {
        d.push(&[x], r).unwrap();
    }
    d
}

/// Train: x=0 -> reward 0, x=1 -> reward 1. Validation: group means 0.22 / 0.78.
/// With a depth-1 tree and learning rate 0.25, the x=1 prediction after m
/// rounds is 1 - 0.5 * 0.75^m (and symmetric for x=0), so validation loss
/// falls for three rounds and rises afterwards.
fn decrease_then_increase() -> (Dataset, Dataset) {
    let mut train = Vec::new();
    for _ in 0..20 {
        train.push((0.0, 0.0));
        train.push((1.0, 1.0));
    }
    let mut val = Vec::new();
    for i in 0..50 {
        val.push((1.0, if i < 39 { 1.0 } else { 0.0 }));
        val.push((0.0, if i < 11 { 1.0 } else { 0.0 }));
    }
    (rows(&train), rows(&val))
}

fn oracle_loss(m: usize) -> f64 {
    let f1 = 1.0 - 0.5 * 0.75f64.powi(m as i32);
    let f0 = 1.0 - f1;
    // per group: 39 (or 11) ones and 11 (or 39) zeros out of 50
    let g1 = (39.0 * (1.0 - f1).powi(2) + 11.0 * f1.powi(2)) / 50.0;
    let g0 = (11.0 * (1.0 - f0).powi(2) + 39.0 * f0.powi(2)) / 50.0;
    (g1 + g0) / 2.0
}

#[test]
fn trace_matches_independent_loss_sequence() {
    let (train, val) = decrease_then_increase();
    let oracle: Vec<f64> = (0..=5).map(oracle_loss).collect();
    assert!(oracle[0] > oracle[1] && oracle[1] > oracle[2] && oracle[2] > oracle[3]);
    assert!(oracle[4] > oracle[3] && oracle[5] > oracle[3]);

    let cfg = TrainConfig { learning_rate: 0.25, patience: 2, max_depth: 1, min_samples_leaf: 1, ..Default::default() };
    let (model, trace) = train_with_validation(&train, &val, &cfg).unwrap();
    assert_eq!(trace.best_iteration, 3);
    assert_eq!(trace.stop_iteration, 5);
    assert_eq!(trace.losses.len(), 6);
    for (got, want) in trace.losses.iter().zip(&oracle) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    assert_eq!(model.n_stages(), 3);
    assert!((model.raw_score(&[1.0]) - (1.0 - 0.5 * 0.75f64.powi(3))).abs() < 1e-12);
}

#[test]
fn log_metric_trace_uses_clipped_cross_entropy() {
    let (train, val) = decrease_then_increase();
    let cfg = TrainConfig {
        learning_rate: 0.25,
        patience: 2,
        max_depth: 1,
        min_samples_leaf: 1,
        loss_metric: LossMetric::Log,
        ..Default::default()
    };
    let (_, trace) = train_with_validation(&train, &val, &cfg).unwrap();
    let ce = |m: usize| {
        let f1: f64 = 1.0 - 0.5 * 0.75f64.powi(m as i32);
        let f0 = 1.0 - f1;
        let g1 = -(39.0 * f1.ln() + 11.0 * (1.0 - f1).ln()) / 50.0;
        let g0 = -(11.0 * f0.ln() + 39.0 * (1.0 - f0).ln()) / 50.0;
        (g1 + g0) / 2.0
    };
    for (m, got) in trace.losses.iter().enumerate() {
        assert!((got - ce(m)).abs() < 1e-12);
    }
}

fn arb_dataset() -> impl Strategy<Value = Dataset> {
    (8usize..60).prop_flat_map(|n| {
        prop::collection::vec((0u8..6, 0u8..4, prop::bool::ANY, 0.0f64..1.0), n).prop_map(|cells| {
            let mut d = Dataset::new(3);
            for (i, (a, b, binary, u)) in cells.into_iter().enumerate() {
                let r = if binary { (u > 0.6) as u8 as f64 } else { u };
                d.push(&[i as f64, a as f64, b as f64], r).unwrap();
            }
            d
        })
    })
}

fn arb_config() -> impl Strategy<Value = TrainConfig> {
    (1usize..4, 1usize..4, 1usize..5, 0usize..25, 0.05f64..1.0, any::<u64>(), prop::bool::ANY).prop_map(
        |(max_depth, min_samples_leaf, patience, max_rounds, learning_rate, seed, log)| TrainConfig {
            max_depth,
            min_samples_leaf,
            patience,
            max_rounds,
            learning_rate,
            seed,
            loss_metric: if log { LossMetric::Log } else { LossMetric::Squared },
            ..Default::default()
        },
    )
}

fn train_sse(model: &esbandit::BoostedModel, d: &Dataset) -> f64 {
    (0..d.len()).map(|i| (d.reward(i) - model.raw_score(d.row(i))).powi(2)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_is_a_partition(d in arb_dataset(), frac in 0.1f64..0.9, seed in any::<u64>()) {
        if let Ok((tr, va)) = split_train_val(&d, frac, seed) {
            prop_assert_eq!(va.len(), (frac * d.len() as f64).round() as usize);
            let mut ids: Vec<usize> = tr.examples().chain(va.examples()).map(|e| e.features[0] as usize).collect();
            ids.sort_unstable();
            prop_assert_eq!(ids, (0..d.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn training_loss_is_monotone(d in arb_dataset(), cfg in arb_config()) {
        let model = train_fixed_rounds(&d, &cfg, cfg.max_rounds).unwrap();
        let mut prev = f64::INFINITY;
        for m in 0..=model.n_stages() {
            let sse = train_sse(&model.truncate(m).unwrap(), &d);
            prop_assert!(sse <= prev + 1e-9, "round {}: {} > {}", m, sse, prev);
            prev = sse;
        }
    }

    #[test]
    fn trace_invariants(d in arb_dataset(), cfg in arb_config()) {
        let (model, trace) = train_early_stopping(&d, &cfg).unwrap();
        let recorded = &trace.losses[..=trace.stop_iteration];
        let min = recorded.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(trace.losses[trace.best_iteration], min);
        prop_assert!(recorded[..trace.best_iteration].iter().all(|&l| l > min));
        prop_assert!(trace.stop_iteration - trace.best_iteration <= cfg.patience);
        prop_assert!(trace.stop_iteration <= cfg.max_rounds);
        prop_assert_eq!(trace.losses.len(), trace.stop_iteration + 1);
        prop_assert_eq!(model.n_stages(), trace.best_iteration);
        for t in model.stages() {
            prop_assert!(t.depth() <= cfg.max_depth);
        }
    }

    #[test]
    fn training_is_deterministic(d in arb_dataset(), cfg in arb_config()) {
        let a = train_early_stopping(&d, &cfg).unwrap();
        let b = train_early_stopping(&d, &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn leaves_hold_routed_means(d in arb_dataset(), depth in 1usize..4, leaf in 1usize..4) {
        let targets: Vec<f64> = (0..d.len()).map(|i| d.reward(i) - 0.5 * d.row(i)[1]).collect();
        let tree = fit_tree(&d, &targets, depth, leaf).unwrap();
        let mut acc = vec![(0.0, 0usize); tree.nodes().len()];
        for i in 0..d.len() {
            let l = tree.leaf_index(d.row(i));
            acc[l].0 += targets[i];
            acc[l].1 += 1;
        }
        for (i, n) in tree.nodes().iter().enumerate() {
            if let Node::Leaf { value } = n {
                prop_assert!(acc[i].1 >= leaf);
                prop_assert!((value - acc[i].0 / acc[i].1 as f64).abs() < 1e-12);
            }
        }
    }
}
