use super::dataset::split_indices;
use super::tree::{check_inputs, grow, SortedColumns};
use super::{Dataset, LossMetric, RegressionTree, TrainConfig, ValidationTrace};
use crate::error::{Error, Result};

/// `F_m(x) = initial + learning_rate * sum_{k <= m} tree_k(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedModel {
    initial_prediction: f64,
    stages: Vec<RegressionTree>,
    learning_rate: f64,
    n_features: usize,
}

impl BoostedModel {
    pub fn new(initial_prediction: f64, stages: Vec<RegressionTree>, learning_rate: f64, n_features: usize) -> Result<Self> {
        if !initial_prediction.is_finite() {
            return Err(Error::param("initial_prediction", "must be finite"));
        }
        if !(learning_rate > 0.0 && learning_rate <= 1.0) {
            return Err(Error::param("learning_rate", format!("{learning_rate} not in (0, 1]")));
        }
        Ok(Self { initial_prediction, stages, learning_rate, n_features })
    }

    pub fn constant(value: f64, learning_rate: f64, n_features: usize) -> Result<Self> {
        Self::new(value, Vec::new(), learning_rate, n_features)
    }

    pub fn initial_prediction(&self) -> f64 {
        self.initial_prediction
    }

    pub fn stages(&self) -> &[RegressionTree] {
        &self.stages
    }

    pub fn n_stages(&self) -> usize {
        self.stages.len()
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Unclipped ensemble score. Panics (via slice indexing) if `x` is shorter
    /// than the training feature vector; use [`predict`](Self::predict) for a
    /// checked call.
    #[inline]
    pub fn raw_score(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.stages.iter().map(|t| t.predict(x)).sum();
        self.initial_prediction + self.learning_rate * sum
    }

    /// Score clipped into `[clip_epsilon, 1 - clip_epsilon]`.
    pub fn predict(&self, x: &[f64], clip_epsilon: f64) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::LengthMismatch { expected: self.n_features, actual: x.len() });
        }
        Ok(self.raw_score(x).clamp(clip_epsilon, 1.0 - clip_epsilon))
    }

    /// Raw scores of every prefix `F_0, F_1, ..., F_M` at `x`.
    pub fn staged_raw_scores(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.stages.len() + 1);
        let mut acc = self.initial_prediction;
        out.push(acc);
        for t in &self.stages {
            acc += self.learning_rate * t.predict(x);
            out.push(acc);
        }
        out
    }

    /// Prefix model keeping the first `iteration` stages.
    pub fn truncate(&self, iteration: usize) -> Result<Self> {
        if iteration > self.stages.len() {
            return Err(Error::IterationOutOfRange { iteration, stages: self.stages.len() });
        }
        Ok(Self { stages: self.stages[..iteration].to_vec(), ..self.clone_header() })
    }

    fn clone_header(&self) -> Self {
        Self {
            initial_prediction: self.initial_prediction,
            stages: Vec::new(),
            learning_rate: self.learning_rate,
            n_features: self.n_features,
        }
    }
}

/// Mean per-example loss of `predictions` against `rewards`.
pub fn loss_from_predictions(predictions: &[f64], rewards: &[f64], metric: LossMetric, clip_epsilon: f64) -> f64 {
    debug_assert_eq!(predictions.len(), rewards.len());
    let n = rewards.len() as f64;
    match metric {
        LossMetric::Squared => predictions.iter().zip(rewards).map(|(p, r)| (r - p) * (r - p)).sum::<f64>() / n,
        LossMetric::Log => {
            predictions
                .iter()
                .zip(rewards)
                .map(|(&p, &r)| {
                    let p = p.clamp(clip_epsilon, 1.0 - clip_epsilon);
                    -(r * p.ln() + (1.0 - r) * (1.0 - p).ln())
                })
                .sum::<f64>()
                / n
        }
    }
}

pub fn validation_loss(model: &BoostedModel, data: &Dataset, metric: LossMetric, clip_epsilon: f64) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.n_features() != model.n_features {
        return Err(Error::LengthMismatch { expected: model.n_features, actual: data.n_features() });
    }
    let preds: Vec<f64> = (0..data.len()).map(|i| model.raw_score(data.row(i))).collect();
    Ok(loss_from_predictions(&preds, data.rewards(), metric, clip_epsilon))
}

/// Patience bookkeeping: strict improvement resets the wait counter, anything
/// else (ties included) increments it.
#[derive(Debug, Clone)]
pub struct EarlyStopper {
    patience: usize,
    best_loss: f64,
    best_iteration: usize,
    iteration: usize,
    wait: usize,
}

impl EarlyStopper {
    pub fn new(initial_loss: f64, patience: usize) -> Self {
        Self { patience, best_loss: initial_loss, best_iteration: 0, iteration: 0, wait: 0 }
    }

    /// Record the loss of the next iteration; returns `true` when training should stop.
    pub fn observe(&mut self, loss: f64) -> bool {
        self.iteration += 1;
        if loss < self.best_loss {
            self.best_loss = loss;
            self.best_iteration = self.iteration;
            self.wait = 0;
        } else {
            self.wait += 1;
        }
        self.wait >= self.patience
    }

    pub fn best_iteration(&self) -> usize {
        self.best_iteration
    }

    pub fn best_loss(&self) -> f64 {
        self.best_loss
    }
}

/// Incremental booster state over one training set.
struct Booster<'a> {
    train: &'a Dataset,
    sorted: SortedColumns,
    predictions: Vec<f64>,
    residuals: Vec<f64>,
    config: &'a TrainConfig,
}

impl<'a> Booster<'a> {
    fn new(train: &'a Dataset, config: &'a TrainConfig) -> Result<(Self, f64)> {
        let f0 = train.mean_reward()?;
        Ok((
            Self {
                train,
                sorted: SortedColumns::new(train),
                predictions: vec![f0; train.len()],
                residuals: vec![0.0; train.len()],
                config,
            },
            f0,
        ))
    }

    fn round(&mut self) -> RegressionTree {
        for ((res, &r), &p) in self.residuals.iter_mut().zip(self.train.rewards()).zip(&self.predictions) {
            *res = r - p;
        }
        let tree = grow(self.train, &self.sorted, &self.residuals, self.config.max_depth, self.config.min_samples_leaf);
        let eta = self.config.learning_rate;
        for (i, p) in self.predictions.iter_mut().enumerate() {
            *p += eta * tree.predict(self.train.row(i));
        }
        tree
    }
}

/// Boost on `train`, early-stopping on `val`.
pub fn train_with_validation(train: &Dataset, val: &Dataset, config: &TrainConfig) -> Result<(BoostedModel, ValidationTrace)> {
    config.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if train.n_features() != val.n_features() {
        return Err(Error::LengthMismatch { expected: train.n_features(), actual: val.n_features() });
    }
    check_inputs(train, train.rewards(), config.min_samples_leaf)?;

    let (mut booster, f0) = Booster::new(train, config)?;
    let mut val_pred = vec![f0; val.len()];
    let loss = |p: &[f64]| loss_from_predictions(p, val.rewards(), config.loss_metric, config.clip_epsilon);
    let mut losses = vec![loss(&val_pred)];
    let mut stopper = EarlyStopper::new(losses[0], config.patience);
    let mut stages = Vec::new();

    for _ in 0..config.max_rounds {
        let tree = booster.round();
        for (i, p) in val_pred.iter_mut().enumerate() {
            *p += config.learning_rate * tree.predict(val.row(i));
        }
        stages.push(tree);
        let l = loss(&val_pred);
        losses.push(l);
        if stopper.observe(l) {
            break;
        }
    }

    let best = stopper.best_iteration();
    let stop_iteration = stages.len();
    stages.truncate(best);
    let model = BoostedModel::new(f0, stages, config.learning_rate, train.n_features())?;
    Ok((model, ValidationTrace { losses, best_iteration: best, stop_iteration }))
}

/// Split `data` with `config.seed`, then run [`train_with_validation`].
pub fn train_early_stopping(data: &Dataset, config: &TrainConfig) -> Result<(BoostedModel, ValidationTrace)> {
    config.validate()?;
    let (train_idx, val_idx) = split_indices(data.len(), config.validation_fraction, config.seed)?;
    train_with_validation(&data.subset(&train_idx), &data.subset(&val_idx), config)
}

/// Boost for exactly `rounds` rounds on all of `data`, with no validation gate.
pub fn train_fixed_rounds(data: &Dataset, config: &TrainConfig, rounds: usize) -> Result<BoostedModel> {
    config.validate()?;
    check_inputs(data, data.rewards(), config.min_samples_leaf)?;
    let (mut booster, f0) = Booster::new(data, config)?;
    let stages = (0..rounds).map(|_| booster.round()).collect();
    BoostedModel::new(f0, stages, config.learning_rate, data.n_features())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbt::{Node, TrainingExample};

    fn stump(value_left: f64, value_right: f64) -> RegressionTree {
        RegressionTree::from_nodes(vec![
            Node::Split { feature: 0, threshold: 0.5, left: 1, right: 2 },
            Node::Leaf { value: value_left },
            Node::Leaf { value: value_right },
        ])
        .unwrap()
    }

    fn binary_feature_data(rows: &[(f64, f64)]) -> Dataset {
        let ex: Vec<_> = rows.iter().map(|&(x, r)| TrainingExample { features: vec![x], reward: r }).collect();
        Dataset::from_examples(&ex).unwrap()
    }

    #[test]
    fn predict_constant_and_one_stage() {
        let m = BoostedModel::constant(0.5, 0.1, 2).unwrap();
        assert_eq!(m.predict(&[3.0, -1.0], 1e-6).unwrap(), 0.5);
        let m = BoostedModel::new(0.5, vec![RegressionTree::leaf(0.2)], 0.1, 1).unwrap();
        assert!((m.predict(&[0.0], 1e-6).unwrap() - 0.52).abs() < 1e-15);
    }

    #[test]
    fn predict_clips_and_checks_length() {
        let m = BoostedModel::new(1.0, vec![RegressionTree::leaf(2.0)], 0.1, 1).unwrap();
        assert_eq!(m.raw_score(&[0.0]), 1.2);
        assert_eq!(m.predict(&[0.0], 1e-6).unwrap(), 1.0 - 1e-6);
        assert_eq!(m.predict(&[0.0, 1.0], 1e-6), Err(Error::LengthMismatch { expected: 1, actual: 2 }));
    }

    #[test]
    fn validation_loss_examples() {
        let m = BoostedModel::constant(0.5, 0.1, 1).unwrap();
        let val = binary_feature_data(&[(0.0, 1.0), (1.0, 0.0)]);
        assert!((validation_loss(&m, &val, LossMetric::Squared, 1e-6).unwrap() - 0.25).abs() < 1e-15);
        let ln2 = -0.5 * (0.5f64.ln() + 0.5f64.ln());
        assert!((validation_loss(&m, &val, LossMetric::Log, 1e-6).unwrap() - ln2).abs() < 1e-15);

        let sure = BoostedModel::constant(1.0, 0.1, 1).unwrap();
        let ones = binary_feature_data(&[(0.0, 1.0)]);
        let l = validation_loss(&sure, &ones, LossMetric::Log, 1e-6).unwrap();
        assert!(l > 0.0 && l < 2e-6);
        assert_eq!(validation_loss(&m, &Dataset::new(1), LossMetric::Log, 1e-6), Err(Error::EmptyDataset));
    }

    #[test]
    fn truncate_prefixes() {
        let m = BoostedModel::new(0.4, vec![stump(-1.0, 1.0), stump(0.5, -0.5), RegressionTree::leaf(0.3)], 0.1, 1)
            .unwrap();
        assert_eq!(m.truncate(0).unwrap().n_stages(), 0);
        assert_eq!(m.truncate(0).unwrap().raw_score(&[0.9]), 0.4);
        for x in [0.0, 1.0] {
            assert_eq!(m.truncate(3).unwrap().raw_score(&[x]), m.raw_score(&[x]));
        }
        // x = 1 routes right: partial sums 0.4, 0.4 + 0.1, 0.4 + 0.1 - 0.05, ... + 0.03
        let expected = [0.4, 0.5, 0.45, 0.48];
        for (k, e) in expected.iter().enumerate() {
            assert!((m.truncate(k).unwrap().raw_score(&[1.0]) - e).abs() < 1e-12);
        }
        assert_eq!(m.staged_raw_scores(&[1.0]).len(), 4);
        assert_eq!(m.truncate(4), Err(Error::IterationOutOfRange { iteration: 4, stages: 3 }));
    }

    #[test]
    fn zero_rounds_is_mean_model() {
        let data = binary_feature_data(&[(0.0, 1.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        let cfg = TrainConfig { max_rounds: 0, ..Default::default() };
        let (m, trace) = train_early_stopping(&data, &cfg).unwrap();
        assert_eq!(m.n_stages(), 0);
        assert_eq!(trace.losses.len(), 1);
        assert_eq!(trace.stop_iteration, 0);
        let (tr, _) = crate::gbt::split_train_val(&data, 0.5, cfg.seed).unwrap();
        assert_eq!(m.initial_prediction(), tr.mean_reward().unwrap());
    }

    #[test]
    fn constant_rewards_stop_after_patience() {
        let rows: Vec<(f64, f64)> = (0..40).map(|i| (i as f64, 0.3)).collect();
        let cfg = TrainConfig { patience: 4, min_samples_leaf: 1, ..Default::default() };
        let (m, trace) = train_early_stopping(&binary_feature_data(&rows), &cfg).unwrap();
        assert_eq!(trace.best_iteration, 0);
        assert_eq!(trace.stop_iteration, 4);
        assert_eq!(trace.losses.len(), 5);
        assert_eq!(m.n_stages(), 0);
    }

    #[test]
    fn stopper_scripted_sequence() {
        let mut s = EarlyStopper::new(1.0, 2);
        let seq = [0.9, 0.8, 0.7, 0.75, 0.8];
        let stops: Vec<bool> = seq.iter().map(|&l| s.observe(l)).collect();
        assert_eq!(stops, [false, false, false, false, true]);
        assert_eq!(s.best_iteration(), 3);
        // ties do not reset the counter
        let mut s = EarlyStopper::new(1.0, 2);
        assert!(!s.observe(1.0));
        assert!(s.observe(1.0));
        assert_eq!(s.best_iteration(), 0);
    }

    #[test]
    fn fixed_rounds_on_constant_rewards() {
        let rows: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, 0.7)).collect();
        let data = binary_feature_data(&rows);
        let m = train_fixed_rounds(&data, &TrainConfig::default(), 3).unwrap();
        assert_eq!(m.n_stages(), 3);
        for i in 0..data.len() {
            assert!((m.raw_score(data.row(i)) - 0.7).abs() < 1e-12);
        }
    }
}
