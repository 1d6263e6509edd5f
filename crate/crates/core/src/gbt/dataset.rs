use rand::seq::SliceRandom;

use crate::error::{Error, Result};

/// One `(features, reward)` observation. Features are the concatenation of
/// context and action features.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub features: Vec<f64>,
    pub reward: f64,
}

/// Row-major feature matrix with one reward per row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    n_features: usize,
    features: Vec<f64>,
    rewards: Vec<f64>,
}

impl Dataset {
    pub fn new(n_features: usize) -> Self {
        Self { n_features, features: Vec::new(), rewards: Vec::new() }
    }

    pub fn with_capacity(n_features: usize, rows: usize) -> Self {
        Self {
            n_features,
            features: Vec::with_capacity(n_features * rows),
            rewards: Vec::with_capacity(rows),
        }
    }

    pub fn from_examples(examples: &[TrainingExample]) -> Result<Self> {
        let first = examples.first().ok_or(Error::EmptyDataset)?;
        let mut data = Self::with_capacity(first.features.len(), examples.len());
        for ex in examples {
            data.push(&ex.features, ex.reward)?;
        }
        Ok(data)
    }

    /// Append a row. Rewards must lie in `[0, 1]` and features must be finite.
    pub fn push(&mut self, features: &[f64], reward: f64) -> Result<()> {
        self.check_row(features)?;
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::param("reward", format!("{reward} not in [0, 1]")));
        }
        self.features.extend_from_slice(features);
        self.rewards.push(reward);
        Ok(())
    }

    /// Append a row built from two feature slices (context then action).
    pub fn push_concat(&mut self, head: &[f64], tail: &[f64], reward: f64) -> Result<()> {
        if head.len() + tail.len() != self.n_features {
            return Err(Error::LengthMismatch { expected: self.n_features, actual: head.len() + tail.len() });
        }
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::param("reward", format!("{reward} not in [0, 1]")));
        }
        self.features.extend_from_slice(head);
        self.features.extend_from_slice(tail);
        self.rewards.push(reward);
        Ok(())
    }

    fn check_row(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.n_features {
            return Err(Error::LengthMismatch { expected: self.n_features, actual: features.len() });
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("features", "non-finite feature value"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features + feature]
    }

    pub fn reward(&self, i: usize) -> f64 {
        self.rewards[i]
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn mean_reward(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyDataset);
        }
        Ok(self.rewards.iter().sum::<f64>() / self.len() as f64)
    }

    /// Copy the given rows, in the given order, into a new dataset.
    pub fn subset(&self, rows: &[usize]) -> Self {
        let mut out = Self::with_capacity(self.n_features, rows.len());
        for &r in rows {
            out.features.extend_from_slice(self.row(r));
            out.rewards.push(self.rewards[r]);
        }
        out
    }

    pub fn examples(&self) -> impl Iterator<Item = TrainingExample> + '_ {
        (0..self.len()).map(|i| TrainingExample { features: self.row(i).to_vec(), reward: self.rewards[i] })
    }
}

/// Shuffle row indices with `seed` and split off `round(fraction * n)` of them
/// as the validation set. Both parts keep rows in shuffled order.
pub fn split_train_val(data: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    let (train, val) = split_indices(data.len(), fraction, seed)?;
    Ok((data.subset(&train), data.subset(&val)))
}

pub(crate) fn split_indices(n: usize, fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::param("validation_fraction", format!("{fraction} not in (0, 1)")));
    }
    let n_val = (fraction * n as f64).round() as usize;
    if n_val == 0 || n_val == n {
        return Err(Error::DegeneratePartition { train: n - n_val, val: n_val });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut crate::rng_from_seed(seed));
    let train = idx.split_off(n_val);
    Ok((train, idx))
}
