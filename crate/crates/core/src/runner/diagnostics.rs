use super::buffer::HistoryBuffer;
use crate::derive_seed;
use crate::envs::Environment;
use crate::error::{Error, Result};
use crate::gbt::{train_early_stopping, BoostedModel, TrainConfig};

/// Early-stopping iterations of `runs` trainings on the same buffer, each
/// with a different random validation split.
pub fn stopping_iterations(
    buffer: &HistoryBuffer,
    env: &Environment,
    gbt: &TrainConfig,
    runs: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let data = buffer.to_dataset(env)?;
    (0..runs)
        .map(|i| {
            let cfg = TrainConfig { seed: derive_seed(seed, i as u64), ..gbt.clone() };
            Ok(train_early_stopping(&data, &cfg)?.1.best_iteration)
        })
        .collect()
}

/// Quality of the model truncated to its first `iteration` trees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPoint {
    pub iteration: usize,
    /// Mean squared error against the true means over all sampled
    /// `(context, action)` pairs.
    pub mse: f64,
    /// Mean regret of greedy selection over the sampled contexts; ties
    /// between estimates are broken uniformly.
    pub regret: f64,
}

/// Evaluates every truncation `0..=stages` of `model` at epoch `t`.
pub fn evaluate_truncations(
    model: &BoostedModel,
    env: &Environment,
    t: usize,
    contexts: &[usize],
    clip_epsilon: f64,
) -> Result<Vec<TruncationPoint>> {
    if contexts.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if model.n_features() != env.n_features() {
        return Err(Error::LengthMismatch { expected: env.n_features(), actual: model.n_features() });
    }
    let k = env.n_actions();
    let m = model.n_stages() + 1;
    let mut sq = vec![0.0; m];
    let mut regret = vec![0.0; m];
    let mut x = vec![0.0; env.n_features()];
    let d = env.pool.dim();
    let mut staged: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut truth = Vec::with_capacity(k);
    for &c in contexts {
        x[..d].copy_from_slice(env.pool.get(c));
        staged.clear();
        for a in 0..k {
            x[d..].copy_from_slice(env.bank.get(a));
            staged.push(model.staged_raw_scores(&x));
        }
        env.schedule.fill_means(t, c, &mut truth);
        let best = truth.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for it in 0..m {
            let mut top = f64::NEG_INFINITY;
            let (mut tied, mut tied_gap) = (0usize, 0.0);
            for a in 0..k {
                let s = staged[a][it].clamp(clip_epsilon, 1.0 - clip_epsilon);
                sq[it] += (s - truth[a]).powi(2);
                if s > top {
                    top = s;
                    tied = 1;
                    tied_gap = best - truth[a];
                } else if s == top {
                    tied += 1;
                    tied_gap += best - truth[a];
                }
            }
            regret[it] += tied_gap / tied as f64;
        }
    }
    let n = contexts.len() as f64;
    Ok((0..m)
        .map(|it| TruncationPoint { iteration: it, mse: sq[it] / (n * k as f64), regret: regret[it] / n })
        .collect())
}
