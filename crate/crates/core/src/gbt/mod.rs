//! Least-squares gradient-boosted regression trees with patience-based early
//! stopping on a random validation split.
//!
//! Training starts from the constant model `F_0 = mean(train rewards)` and adds
//! one depth-limited CART tree per round, fitted to the current residuals and
//! shrunk by the learning rate. After every round the validation loss is
//! recorded; a round only counts as progress when it strictly improves on the
//! best loss so far, and training stops once `patience` rounds in a row fail to
//! improve. The returned model is the best-iteration prefix.

mod boost;
mod dataset;
mod tree;

pub use boost::{
    loss_from_predictions, train_early_stopping, train_fixed_rounds, train_with_validation,
    validation_loss, BoostedModel, EarlyStopper,
};
pub use dataset::{split_train_val, Dataset, TrainingExample};
pub use tree::{fit_tree, Node, RegressionTree, SortedColumns};

use crate::error::{Error, Result};

/// Validation loss used for early stopping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossMetric {
    /// Mean squared error on raw (unclipped) predictions.
    Squared,
    /// Binary cross-entropy on predictions clipped into `[eps, 1 - eps]`.
    Log,
}

impl LossMetric {
    pub fn name(self) -> &'static str {
        match self {
            LossMetric::Squared => "squared",
            LossMetric::Log => "log",
        }
    }
}

impl std::str::FromStr for LossMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" => Ok(LossMetric::Squared),
            "log" => Ok(LossMetric::Log),
            other => Err(Error::param("loss_metric", format!("unknown metric `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_rounds: usize,
    /// Number of consecutive non-improving rounds tolerated before stopping.
    pub patience: usize,
    pub validation_fraction: f64,
    pub loss_metric: LossMetric,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub clip_epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_rounds: 200,
            patience: 5,
            validation_fraction: 0.5,
            loss_metric: LossMetric::Squared,
            max_depth: 3,
            min_samples_leaf: 5,
            clip_epsilon: 1e-6,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::param("learning_rate", format!("{} not in (0, 1]", self.learning_rate)));
        }
        if self.patience == 0 {
            return Err(Error::param("patience", "must be positive"));
        }
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::param(
                "validation_fraction",
                format!("{} not in (0, 1)", self.validation_fraction),
            ));
        }
        if self.max_depth == 0 {
            return Err(Error::param("max_depth", "must be positive"));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::param("min_samples_leaf", "must be positive"));
        }
        if !(self.clip_epsilon > 0.0 && self.clip_epsilon < 0.5) {
            return Err(Error::param("clip_epsilon", format!("{} not in (0, 0.5)", self.clip_epsilon)));
        }
        Ok(())
    }
}

/// Per-round validation losses of one early-stopped training run.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationTrace {
    /// `losses[m]` is the validation loss of `F_m`; index 0 is the constant model.
    pub losses: Vec<f64>,
    pub best_iteration: usize,
    /// Last round that was trained (equals `max_rounds` if patience never ran out).
    pub stop_iteration: usize,
}
