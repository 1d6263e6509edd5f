use rand::seq::index::sample;
use rand::Rng;

use super::synthetic::{GroundTruthModel, LabelTable, SyntheticTruth};
use crate::error::{Error, Result};
use crate::rng_from_seed;

/// A label table after moving positives onto random negatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlippedLabels {
    pub table: LabelTable,
    /// Rows changed from 1 to 0, ascending.
    pub to_zero: Vec<usize>,
    /// Rows changed from 0 to 1, ascending.
    pub to_one: Vec<usize>,
}

/// Sets `floor(q * positives)` random positive labels to 0 and as many
/// random negative labels to 1, so the positive count is unchanged.
pub fn flip_labels(table: &LabelTable, q: f64, seed: u64) -> Result<FlippedLabels> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::param("flip_fraction", format!("must lie in [0, 1], got {q}")));
    }
    let pos: Vec<usize> = (0..table.len()).filter(|&i| table.labels[i]).collect();
    let neg: Vec<usize> = (0..table.len()).filter(|&i| !table.labels[i]).collect();
    let m = (q * pos.len() as f64).floor() as usize;
    if m > neg.len() {
        return Err(Error::InvalidCounts(format!("{m} flips need more than the {} negatives", neg.len())));
    }
    let mut rng = rng_from_seed(seed);
    let mut to_zero: Vec<usize> = sample(&mut rng, pos.len(), m).into_iter().map(|i| pos[i]).collect();
    let mut to_one: Vec<usize> = sample(&mut rng, neg.len(), m).into_iter().map(|i| neg[i]).collect();
    to_zero.sort_unstable();
    to_one.sort_unstable();
    let mut flipped = table.clone();
    for &i in &to_zero {
        flipped.labels[i] = false;
    }
    for &i in &to_one {
        flipped.labels[i] = true;
    }
    Ok(FlippedLabels { table: flipped, to_zero, to_one })
}

/// Refits the truth on a flipped copy of its label table.
pub fn make_drifted_truth(truth: &SyntheticTruth, q: f64, seed: u64) -> Result<(GroundTruthModel, FlippedLabels)> {
    let flipped = flip_labels(&truth.labels, q, seed)?;
    let model = GroundTruthModel::fit(&truth.pool, &truth.bank, &flipped.table, &truth.fit, truth.rounds)?;
    Ok((model, flipped))
}

/// Mean reward over epochs: `F_0` before `start`, `F_1` after `end`, and
/// `(F_0 (end - t) + F_1 (t - start)) / (end - start)` in between.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSchedule {
    initial: GroundTruthModel,
    last: Option<GroundTruthModel>,
    start: usize,
    end: usize,
}

impl DriftSchedule {
    pub fn new(initial: GroundTruthModel, last: GroundTruthModel, start: usize, end: usize) -> Result<Self> {
        if start >= end {
            return Err(Error::param("drift_start", format!("{start} must precede {end}")));
        }
        if initial.n_actions() != last.n_actions() || initial.n_contexts() != last.n_contexts() {
            return Err(Error::param("truth", "both models must cover the same contexts and actions"));
        }
        Ok(Self { initial, last: Some(last), start, end })
    }

    pub fn stationary(model: GroundTruthModel) -> Self {
        Self { initial: model, last: None, start: 0, end: 1 }
    }

    pub fn is_stationary(&self) -> bool {
        self.last.is_none()
    }

    pub fn window(&self) -> (usize, usize) {
        (self.start, self.end)
    }

    pub fn initial(&self) -> &GroundTruthModel {
        &self.initial
    }

    pub fn last(&self) -> &GroundTruthModel {
        self.last.as_ref().unwrap_or(&self.initial)
    }

    pub fn n_actions(&self) -> usize {
        self.initial.n_actions()
    }

    /// Weights `(w_0, w_1)` of the two truths at epoch `t`.
    pub fn weights(&self, t: usize) -> (f64, f64) {
        if self.last.is_none() || t < self.start {
            (1.0, 0.0)
        } else if t > self.end {
            (0.0, 1.0)
        } else {
            let span = (self.end - self.start) as f64;
            ((self.end - t) as f64 / span, (t - self.start) as f64 / span)
        }
    }

    pub fn mean_reward(&self, t: usize, context: usize, action: usize) -> f64 {
        match (&self.last, self.weights(t)) {
            (Some(last), (w0, w1)) if w1 > 0.0 => {
                if w0 == 0.0 {
                    last.mean(context, action)
                } else {
                    w0 * self.initial.mean(context, action) + w1 * last.mean(context, action)
                }
            }
            _ => self.initial.mean(context, action),
        }
    }

    /// Writes every action's mean reward for `context` at epoch `t` into `out`.
    pub fn fill_means(&self, t: usize, context: usize, out: &mut Vec<f64>) {
        out.clear();
        out.extend((0..self.n_actions()).map(|a| self.mean_reward(t, context, a)));
    }

    pub fn sample_reward<R: Rng + ?Sized>(&self, t: usize, context: usize, action: usize, rng: &mut R) -> bool {
        rng.random_bool(self.mean_reward(t, context, action))
    }

    /// Best action and its mean; ties go to the lowest index.
    pub fn oracle_best(&self, t: usize, context: usize) -> (usize, f64) {
        (0..self.n_actions()).fold((0, f64::NEG_INFINITY), |best, a| {
            let m = self.mean_reward(t, context, a);
            if m > best.1 { (a, m) } else { best }
        })
    }
}
