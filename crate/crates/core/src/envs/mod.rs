//! Synthetic reward environments.
//!
//! A nonlinear latent function of context and action features generates
//! Bernoulli labels; a boosted model fitted to those labels then serves as
//! the ground-truth mean reward. Non-stationary environments fit a second
//! truth on a label table with part of its positives moved to random
//! negatives, and blend the two over a window of epochs.

mod drift;
mod synthetic;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gbt::TrainConfig;

pub use drift::{flip_labels, make_drifted_truth, DriftSchedule, FlippedLabels};
pub use synthetic::{
    build_synthetic_truth, ActionBank, ContextPool, GroundTruthModel, LabelTable, LatentFunction, SyntheticTruth,
    TRUTH_CLIP,
};

/// Named environment settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// 2 context features, 5 action features, 18 actions.
    Simple,
    /// `Simple` with label-flip drift over epochs 45..=60.
    Drift,
    /// 20 context features, 50 actions.
    Full,
    /// Constant true mean reward.
    Null,
    /// Few, large effects.
    Strong,
}

impl Preset {
    pub const ALL: [Preset; 5] = [Preset::Simple, Preset::Drift, Preset::Full, Preset::Null, Preset::Strong];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Simple => "simple",
            Preset::Drift => "drift",
            Preset::Full => "full",
            Preset::Null => "null",
            Preset::Strong => "strong",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::param("environment", format!("unknown preset `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentConfig {
    pub context_dim: usize,
    pub pool_size: usize,
    /// Levels of each action attribute; the bank is their full grid.
    pub action_levels: Vec<usize>,
    /// Number of (context, action, label) rows the truth is fitted on.
    pub label_rows: usize,
    /// Mean of the latent success probability over the label table.
    pub target_mean: f64,
    /// Number of interaction terms in the latent function.
    pub latent_terms: usize,
    /// Scale of the latent logit; 0 gives a constant truth.
    pub signal: f64,
    /// Fraction of positive labels moved by the drift construction.
    pub flip_fraction: f64,
    pub stationary: bool,
    pub drift_start: usize,
    pub drift_end: usize,
    /// Learner settings for the ground-truth fits.
    pub truth_fit: TrainConfig,
    pub truth_rounds: usize,
    pub seed: u64,
}

impl EnvironmentConfig {
    pub fn preset(preset: Preset, seed: u64) -> Self {
        let base = Self {
            context_dim: 2,
            pool_size: 1000,
            action_levels: vec![3, 3, 2],
            label_rows: 4000,
            target_mean: 0.3,
            latent_terms: 6,
            signal: 0.5,
            flip_fraction: 0.5,
            stationary: true,
            drift_start: 45,
            drift_end: 60,
            truth_fit: TrainConfig { max_depth: 4, min_samples_leaf: 10, learning_rate: 0.1, ..TrainConfig::default() },
            truth_rounds: 100,
            seed,
        };
        match preset {
            Preset::Simple => base,
            Preset::Drift => Self { stationary: false, ..base },
            Preset::Full => Self {
                context_dim: 20,
                action_levels: vec![5, 5, 2],
                pool_size: 2000,
                label_rows: 10_000,
                latent_terms: 12,
                ..base
            },
            Preset::Null => Self { signal: 0.0, truth_rounds: 0, ..base },
            Preset::Strong => Self { latent_terms: 3, signal: 4.0, ..base },
        }
    }

    pub fn n_actions(&self) -> usize {
        self.action_levels.iter().product()
    }

    pub fn validate(&self) -> Result<()> {
        if self.context_dim == 0 {
            return Err(Error::param("context_dim", "must be positive"));
        }
        if self.pool_size == 0 {
            return Err(Error::param("pool_size", "must be positive"));
        }
        if self.action_levels.is_empty() || self.action_levels.contains(&0) {
            return Err(Error::param("action_levels", "every attribute needs at least one level"));
        }
        if self.n_actions() < 2 {
            return Err(Error::param("action_levels", "need at least two actions"));
        }
        if self.label_rows < 2 {
            return Err(Error::param("label_rows", "need at least two rows"));
        }
        if !(self.target_mean > 0.0 && self.target_mean < 1.0) {
            return Err(Error::param("target_mean", format!("must lie in (0, 1), got {}", self.target_mean)));
        }
        if !(self.signal >= 0.0 && self.signal.is_finite()) {
            return Err(Error::param("signal", "must be finite and non-negative"));
        }
        if !(0.0..=1.0).contains(&self.flip_fraction) {
            return Err(Error::param("flip_fraction", "must lie in [0, 1]"));
        }
        if self.drift_start >= self.drift_end {
            return Err(Error::param("drift_start", "must precede drift_end"));
        }
        self.truth_fit.validate()
    }
}

/// Everything the simulation needs: contexts, actions and the reward schedule.
#[derive(Debug, Clone)]
pub struct Environment {
    pub pool: ContextPool,
    pub bank: ActionBank,
    pub schedule: DriftSchedule,
    /// Labels behind the final truth (`F_1`).
    pub labels: LabelTable,
}

impl Environment {
    pub fn build(config: &EnvironmentConfig) -> Result<Self> {
        let truth = build_synthetic_truth(config)?;
        let schedule = if config.stationary {
            DriftSchedule::stationary(truth.model.clone())
        } else {
            let (initial, _) = make_drifted_truth(&truth, config.flip_fraction, crate::derive_seed(config.seed, 7))?;
            DriftSchedule::new(initial, truth.model.clone(), config.drift_start, config.drift_end)?
        };
        Ok(Self { pool: truth.pool, bank: truth.bank, schedule, labels: truth.labels })
    }

    pub fn n_actions(&self) -> usize {
        self.bank.len()
    }

    pub fn n_features(&self) -> usize {
        self.pool.dim() + self.bank.dim()
    }
}
