//! Mapping between configuration files and experiment settings.

use std::fmt::Write as _;

use esbandit::gbt::TrainConfig;
use esbandit::runner::{EnvironmentSeeding, DRIFT_WINDOW};
use esbandit::{EnvironmentConfig, EstimatorMode, ExperimentConfig, PolicyConfig, PolicyKind, Preset};

use crate::config::{Config, ConfigError};
use crate::format::fmt_num;

/// `none` or a positive record count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Window(Option<usize>);

impl std::str::FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "none" {
            return Ok(Window(None));
        }
        s.parse().map(|w| Window(Some(w))).map_err(|_| format!("expected `none` or an integer, got `{s}`"))
    }
}

/// Comma-separated attribute levels, e.g. `3,3,2`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Levels(Vec<usize>);

impl std::str::FromStr for Levels {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<_, _>>()
            .map(Levels)
    }
}

fn levels_to_string(levels: &[usize]) -> String {
    levels.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Environment settings: the preset plus optional per-field overrides.
pub fn environment_from(cfg: &Config, preset: Preset, seed: u64) -> Result<EnvironmentConfig, ConfigError> {
    let base = EnvironmentConfig::preset(preset, seed);
    Ok(EnvironmentConfig {
        context_dim: cfg.or("context_dim", base.context_dim)?,
        pool_size: cfg.or("pool_size", base.pool_size)?,
        action_levels: cfg.or("action_levels", Levels(base.action_levels.clone()))?.0,
        label_rows: cfg.or("label_rows", base.label_rows)?,
        target_mean: cfg.or("target_mean", base.target_mean)?,
        latent_terms: cfg.or("latent_terms", base.latent_terms)?,
        signal: cfg.or("signal", base.signal)?,
        flip_fraction: cfg.or("flip_fraction", base.flip_fraction)?,
        stationary: cfg.or("stationary", base.stationary)?,
        drift_start: cfg.or("drift_start", base.drift_start)?,
        drift_end: cfg.or("drift_end", base.drift_end)?,
        truth_rounds: cfg.or("truth_rounds", base.truth_rounds)?,
        ..base
    })
}

/// Learner settings under `gbt_*` keys.
pub fn gbt_from(cfg: &Config) -> Result<TrainConfig, ConfigError> {
    let d = TrainConfig::default();
    Ok(TrainConfig {
        learning_rate: cfg.or("gbt_learning_rate", d.learning_rate)?,
        max_rounds: cfg.or("gbt_max_rounds", d.max_rounds)?,
        patience: cfg.or("gbt_patience", d.patience)?,
        validation_fraction: cfg.or("gbt_validation_fraction", d.validation_fraction)?,
        loss_metric: cfg.or("gbt_loss_metric", d.loss_metric)?,
        max_depth: cfg.or("gbt_max_depth", d.max_depth)?,
        min_samples_leaf: cfg.or("gbt_min_samples_leaf", d.min_samples_leaf)?,
        clip_epsilon: cfg.or("gbt_clip_epsilon", d.clip_epsilon)?,
        seed: d.seed,
    })
}

/// A `simulate` run. `preset`, `estimator` and `policy` are required.
pub fn experiment_from(cfg: &Config) -> Result<(Preset, ExperimentConfig), ConfigError> {
    let preset: Option<Preset> = cfg.required("preset")?;
    let estimator: Option<EstimatorMode> = cfg.required("estimator")?;
    let kind: Option<PolicyKind> = cfg.required("policy")?;
    let seed = cfg.or("seed", 0u64)?;
    let preset = preset.unwrap_or(Preset::Simple);

    let environment = environment_from(cfg, preset, seed)?;
    let d = PolicyConfig::greedy();
    let policy = PolicyConfig {
        kind: kind.unwrap_or(PolicyKind::Greedy),
        epsilon: cfg.or("epsilon", d.epsilon)?,
        falcon_c: cfg.or("falcon_c", d.falcon_c)?,
        exp_temperature: cfg.or("exp_temperature", d.exp_temperature)?,
        ..d
    };
    let stationary = environment.stationary;
    let default_window = Window(if stationary { None } else { Some(DRIFT_WINDOW) });
    let experiment = ExperimentConfig {
        burn_in: cfg.or("burn_in", 1000)?,
        epochs: cfg.or("epochs", if stationary { 100 } else { 150 })?,
        epoch_size: cfg.or("epoch_size", 100)?,
        window: cfg.or("window", default_window)?.0,
        estimator: estimator.unwrap_or(EstimatorMode::EarlyStop),
        policy,
        environment,
        environment_seeding: cfg.or("environment_seed", EnvironmentSeeding::PerReplication)?,
        gbt: gbt_from(cfg)?,
        replications: cfg.or("replications", 1)?,
        seed,
    };
    Ok((preset, experiment))
}

/// `key = value` lines for every environment field that has a key.
pub fn write_environment(out: &mut String, env: &EnvironmentConfig) {
    let _ = writeln!(out, "context_dim = {}", env.context_dim);
    let _ = writeln!(out, "pool_size = {}", env.pool_size);
    let _ = writeln!(out, "action_levels = {}", levels_to_string(&env.action_levels));
    let _ = writeln!(out, "label_rows = {}", env.label_rows);
    let _ = writeln!(out, "target_mean = {}", fmt_num(env.target_mean));
    let _ = writeln!(out, "latent_terms = {}", env.latent_terms);
    let _ = writeln!(out, "signal = {}", fmt_num(env.signal));
    let _ = writeln!(out, "flip_fraction = {}", fmt_num(env.flip_fraction));
    let _ = writeln!(out, "stationary = {}", env.stationary);
    let _ = writeln!(out, "drift_start = {}", env.drift_start);
    let _ = writeln!(out, "drift_end = {}", env.drift_end);
    let _ = writeln!(out, "truth_rounds = {}", env.truth_rounds);
}

pub fn write_gbt(out: &mut String, gbt: &TrainConfig) {
    let _ = writeln!(out, "gbt_learning_rate = {}", fmt_num(gbt.learning_rate));
    let _ = writeln!(out, "gbt_max_rounds = {}", gbt.max_rounds);
    let _ = writeln!(out, "gbt_patience = {}", gbt.patience);
    let _ = writeln!(out, "gbt_validation_fraction = {}", fmt_num(gbt.validation_fraction));
    let _ = writeln!(out, "gbt_loss_metric = {}", gbt.loss_metric.name());
    let _ = writeln!(out, "gbt_max_depth = {}", gbt.max_depth);
    let _ = writeln!(out, "gbt_min_samples_leaf = {}", gbt.min_samples_leaf);
    let _ = writeln!(out, "gbt_clip_epsilon = {}", fmt_num(gbt.clip_epsilon));
}

/// Every key of a resolved `simulate` run, re-parseable by [`experiment_from`].
pub fn experiment_keys(preset: Preset, x: &ExperimentConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "preset = {preset}");
    let _ = writeln!(out, "estimator = {}", x.estimator);
    let _ = writeln!(out, "policy = {}", x.policy.kind);
    let _ = writeln!(out, "seed = {}", x.seed);
    let _ = writeln!(out, "replications = {}", x.replications);
    let _ = writeln!(out, "burn_in = {}", x.burn_in);
    let _ = writeln!(out, "epochs = {}", x.epochs);
    let _ = writeln!(out, "epoch_size = {}", x.epoch_size);
    let _ = writeln!(out, "window = {}", x.window.map_or("none".to_string(), |w| w.to_string()));
    let _ = writeln!(out, "environment_seed = {}", x.environment_seeding);
    let _ = writeln!(out, "epsilon = {}", fmt_num(x.policy.epsilon));
    let _ = writeln!(out, "falcon_c = {}", fmt_num(x.policy.falcon_c));
    let _ = writeln!(out, "exp_temperature = {}", fmt_num(x.policy.exp_temperature));
    write_environment(&mut out, &x.environment);
    write_gbt(&mut out, &x.gbt);
    out
}

/// Writes a manifest: a comment header naming the tool, command and
/// outputs, followed by resolved `key = value` lines.
pub fn manifest(command: &str, outputs: &[&std::path::Path], keys: &str) -> String {
    let mut out = format!("# esbandit {} {command}\n", env!("CARGO_PKG_VERSION"));
    for p in outputs {
        let _ = writeln!(out, "# output: {}", p.display());
    }
    out.push_str(keys);
    out
}
