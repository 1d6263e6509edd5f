use super::buffer::{HistoryBuffer, InteractionRecord};
use super::metrics::{EpochRow, MetricsLog};
use super::{EnvironmentSeeding, EstimatorMode, ExperimentConfig};
use crate::envs::Environment;
use crate::error::Result;
use crate::gbt::{train_early_stopping, train_fixed_rounds, BoostedModel, TrainConfig};
use crate::policies::{sample_action, PolicyConfig};
use crate::{derive_seed, rng_from_seed, SimRng};

/// Chooses an action from per-action reward estimates.
pub trait Selector {
    fn select(&mut self, estimates: &[f64], context: usize, epoch: usize, buffer_len: usize, rng: &mut SimRng)
        -> Result<usize>;
}

impl Selector for PolicyConfig {
    fn select(&mut self, estimates: &[f64], _: usize, _: usize, buffer_len: usize, rng: &mut SimRng) -> Result<usize> {
        Ok(sample_action(&self.distribution(estimates, buffer_len)?, rng))
    }
}

/// Totals over one epoch of play.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochOutcome {
    pub rounds: usize,
    pub reward: u64,
    /// Sum of `best mean - chosen mean`.
    pub regret: f64,
}

/// Seed of replication `replication`, independent of how many others run.
pub fn replication_seed(master: u64, replication: usize) -> u64 {
    derive_seed(master, replication as u64)
}

/// `burn_in` rounds of uniformly random actions, with rewards drawn at epoch 0.
pub fn run_burn_in(env: &Environment, burn_in: usize, window: Option<usize>, rng: &mut SimRng) -> HistoryBuffer {
    use rand::Rng;
    let mut buffer = HistoryBuffer::new(window);
    for _ in 0..burn_in {
        let context = env.pool.sample_index(rng);
        let action = rng.random_range(0..env.n_actions());
        let reward = env.schedule.sample_reward(0, context, action, rng);
        buffer.push(InteractionRecord { epoch: 0, context, action, reward });
    }
    buffer
}

/// Fits the epoch's estimator. Returns the model and its stopping iteration
/// (the best validation iteration, or the fixed round count).
pub fn train_epoch_model(
    buffer: &HistoryBuffer,
    env: &Environment,
    mode: EstimatorMode,
    gbt: &TrainConfig,
    split_seed: u64,
) -> Result<(BoostedModel, usize)> {
    let data = buffer.to_dataset(env)?;
    match mode {
        EstimatorMode::EarlyStop => {
            let cfg = TrainConfig { seed: split_seed, ..gbt.clone() };
            let (model, trace) = train_early_stopping(&data, &cfg)?;
            Ok((model, trace.best_iteration))
        }
        EstimatorMode::Fixed(m) => Ok((train_fixed_rounds(&data, gbt, m)?, m)),
    }
}

/// Plays `rounds` rounds at epoch `t`, appending each interaction to `buffer`.
#[allow(clippy::too_many_arguments)]
pub fn run_epoch<S: Selector + ?Sized>(
    env: &Environment,
    t: usize,
    model: &BoostedModel,
    clip_epsilon: f64,
    selector: &mut S,
    buffer: &mut HistoryBuffer,
    rounds: usize,
    rng: &mut SimRng,
) -> Result<EpochOutcome> {
    let k = env.n_actions();
    let mut x = vec![0.0; env.n_features()];
    let ctx_dim = env.pool.dim();
    let mut estimates = vec![0.0; k];
    let mut outcome = EpochOutcome { rounds, reward: 0, regret: 0.0 };
    for _ in 0..rounds {
        let context = env.pool.sample_index(rng);
        x[..ctx_dim].copy_from_slice(env.pool.get(context));
        for (a, e) in estimates.iter_mut().enumerate() {
            x[ctx_dim..].copy_from_slice(env.bank.get(a));
            *e = model.predict(&x, clip_epsilon)?;
        }
        let action = selector.select(&estimates, context, t, buffer.len(), rng)?;
        let reward = env.schedule.sample_reward(t, context, action, rng);
        let (_, best) = env.schedule.oracle_best(t, context);
        outcome.reward += reward as u64;
        outcome.regret += best - env.schedule.mean_reward(t, context, action);
        buffer.push(InteractionRecord { epoch: t, context, action, reward });
    }
    Ok(outcome)
}

/// One replication with the policy in `config`.
pub fn run_replication(config: &ExperimentConfig, env: &Environment, replication: usize) -> Result<Vec<EpochRow>> {
    let mut policy = config.policy.clone();
    run_replication_with(config, env, replication, &mut policy)
}

pub fn run_replication_with<S: Selector + ?Sized>(
    config: &ExperimentConfig,
    env: &Environment,
    replication: usize,
    selector: &mut S,
) -> Result<Vec<EpochRow>> {
    let seed = replication_seed(config.seed, replication);
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let mut buffer = run_burn_in(env, config.burn_in, config.window, &mut rng);
    let mut rows = Vec::with_capacity(config.epochs);
    let (mut cum_reward, mut cum_regret) = (0u64, 0.0);
    for t in 0..config.epochs {
        let split_seed = derive_seed(seed, (1 << 32) + t as u64);
        let (model, stop_iteration) = train_epoch_model(&buffer, env, config.estimator, &config.gbt, split_seed)?;
        let out = run_epoch(env, t, &model, config.gbt.clip_epsilon, selector, &mut buffer, config.epoch_size, &mut rng)?;
        cum_reward += out.reward;
        cum_regret += out.regret;
        rows.push(EpochRow {
            replication,
            epoch: t,
            cum_reward,
            cum_regret,
            mean_regret: out.regret / out.rounds as f64,
            stop_iteration,
        });
    }
    Ok(rows)
}

/// All replications of `config`. Environments follow
/// `config.environment_seeding`; a fixed environment is built once.
pub fn run_experiment(config: &ExperimentConfig) -> Result<MetricsLog> {
    config.validate()?;
    let shared = match config.environment_seeding {
        EnvironmentSeeding::Fixed(_) => Some(Environment::build(&config.environment_for(0))?),
        EnvironmentSeeding::PerReplication => None,
    };
    let mut rows = Vec::with_capacity(config.replications * config.epochs);
    for r in 0..config.replications {
        let rep_rows = match &shared {
            Some(env) => run_replication(config, env, r)?,
            None => run_replication(config, &Environment::build(&config.environment_for(r))?, r)?,
        };
        rows.extend(rep_rows);
    }
    Ok(MetricsLog { rows })
}
