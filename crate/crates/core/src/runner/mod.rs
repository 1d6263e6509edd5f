//! Epoch-scheduled bandit simulation.
//!
//! After a burn-in of uniformly random actions, every epoch retrains the
//! reward estimator on the history buffer, then plays `epoch_size` rounds
//! with the chosen policy. Regret is measured against true mean rewards.

mod buffer;
mod diagnostics;
mod metrics;
mod sim;

use std::fmt;
use std::str::FromStr;

use crate::envs::{EnvironmentConfig, Preset};
use crate::error::{Error, Result};
use crate::gbt::TrainConfig;
use crate::policies::{PolicyConfig, PolicyKind};

pub use buffer::{apply_window, HistoryBuffer, InteractionRecord};
pub use diagnostics::{evaluate_truncations, stopping_iterations, TruncationPoint};
pub use metrics::{aggregate_replications, AggregateCurves, EpochRow, MetricsLog, SeriesSummary};
pub use sim::{
    run_replication_with,
    replication_seed, run_burn_in, run_epoch, run_experiment, run_replication, train_epoch_model, EpochOutcome,
    Selector,
};

/// Window used in non-stationary runs.
pub const DRIFT_WINDOW: usize = 4500;

/// Rounds of the fixed-iteration baseline.
pub const DEFAULT_FIXED_ROUNDS: usize = 30;

/// How the per-epoch estimator is trained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorMode {
    /// Random validation split with patience-based early stopping.
    EarlyStop,
    /// Exactly this many rounds on the whole buffer.
    Fixed(usize),
}

impl fmt::Display for EstimatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorMode::EarlyStop => f.write_str("early_stop"),
            EstimatorMode::Fixed(m) => write!(f, "fixed:{m}"),
        }
    }
}

impl FromStr for EstimatorMode {
    type Err = Error;

    /// `early_stop`, `fixed` (30 rounds) or `fixed:M`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "early_stop" => Ok(EstimatorMode::EarlyStop),
            "fixed" => Ok(EstimatorMode::Fixed(DEFAULT_FIXED_ROUNDS)),
            _ => s
                .strip_prefix("fixed:")
                .and_then(|m| m.parse().ok())
                .map(EstimatorMode::Fixed)
                .ok_or_else(|| Error::param("estimator", format!("unknown estimator `{s}`"))),
        }
    }
}

/// Where each replication's environment comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnvironmentSeeding {
    /// A fresh environment per replication, seeded from the replication seed.
    PerReplication,
    /// One environment with this seed shared by all replications.
    Fixed(u64),
}

impl fmt::Display for EnvironmentSeeding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvironmentSeeding::PerReplication => f.write_str("per_replication"),
            EnvironmentSeeding::Fixed(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for EnvironmentSeeding {
    type Err = Error;

    /// `per_replication` or an integer seed.
    fn from_str(s: &str) -> Result<Self> {
        if s == "per_replication" {
            return Ok(EnvironmentSeeding::PerReplication);
        }
        s.parse()
            .map(EnvironmentSeeding::Fixed)
            .map_err(|_| Error::param("environment_seed", format!("expected `per_replication` or an integer, got `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub burn_in: usize,
    pub epochs: usize,
    pub epoch_size: usize,
    /// Most recent records kept for training; `None` keeps everything.
    pub window: Option<usize>,
    pub estimator: EstimatorMode,
    pub policy: PolicyConfig,
    /// Environment settings; the seed inside is replaced according to `environment_seeding`.
    pub environment: EnvironmentConfig,
    pub environment_seeding: EnvironmentSeeding,
    pub gbt: TrainConfig,
    pub replications: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Defaults for a preset: 1000 burn-in records, epochs of 100 rounds,
    /// 100 epochs with an unlimited buffer when stationary, 150 epochs with a
    /// 4500-record window otherwise.
    pub fn for_preset(preset: Preset, estimator: EstimatorMode, policy: PolicyConfig, seed: u64) -> Self {
        let environment = EnvironmentConfig::preset(preset, seed);
        let stationary = environment.stationary;
        Self {
            burn_in: 1000,
            epochs: if stationary { 100 } else { 150 },
            epoch_size: 100,
            window: if stationary { None } else { Some(DRIFT_WINDOW) },
            estimator,
            policy,
            environment,
            environment_seeding: EnvironmentSeeding::PerReplication,
            gbt: TrainConfig::default(),
            replications: 1,
            seed,
        }
    }

    /// Environment settings of replication `replication`.
    pub fn environment_for(&self, replication: usize) -> EnvironmentConfig {
        let seed = match self.environment_seeding {
            EnvironmentSeeding::PerReplication => crate::derive_seed(sim::replication_seed(self.seed, replication), 1),
            EnvironmentSeeding::Fixed(s) => s,
        };
        EnvironmentConfig { seed, ..self.environment.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.burn_in == 0 {
            return Err(Error::param("burn_in", "must be at least 1"));
        }
        if self.epoch_size == 0 {
            return Err(Error::param("epoch_size", "must be at least 1"));
        }
        if self.window == Some(0) {
            return Err(Error::param("window", "must be at least 1"));
        }
        if self.replications == 0 {
            return Err(Error::param("replications", "must be at least 1"));
        }
        if self.policy.kind == PolicyKind::Thompson {
            return Err(Error::param("policy", "thompson needs per-arm counts and is not available here"));
        }
        self.policy.validate()?;
        self.environment.validate()?;
        self.gbt.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_mode_round_trip() {
        for m in [EstimatorMode::EarlyStop, EstimatorMode::Fixed(30), EstimatorMode::Fixed(0)] {
            assert_eq!(m.to_string().parse::<EstimatorMode>().unwrap(), m);
        }
        assert_eq!("fixed".parse::<EstimatorMode>().unwrap(), EstimatorMode::Fixed(30));
        assert!("fixed:x".parse::<EstimatorMode>().is_err());
        for s in [EnvironmentSeeding::PerReplication, EnvironmentSeeding::Fixed(12)] {
            assert_eq!(s.to_string().parse::<EnvironmentSeeding>().unwrap(), s);
        }
        assert!("x".parse::<EnvironmentSeeding>().is_err());
    }

    #[test]
    fn preset_defaults() {
        let s = ExperimentConfig::for_preset(Preset::Simple, EstimatorMode::EarlyStop, PolicyConfig::greedy(), 0);
        assert_eq!((s.burn_in, s.epochs, s.epoch_size, s.window), (1000, 100, 100, None));
        let d = ExperimentConfig::for_preset(Preset::Drift, EstimatorMode::EarlyStop, PolicyConfig::greedy(), 0);
        assert_eq!((d.epochs, d.window), (150, Some(4500)));
        let ts = ExperimentConfig { policy: PolicyConfig::with_kind(PolicyKind::Thompson), ..s };
        assert!(ts.validate().is_err());
    }
}
