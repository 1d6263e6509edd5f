use std::cmp::Ordering;

use rand::Rng;
use rand_distr::{Beta, Distribution};

use super::allocation::{coin, hypergeometric, posterior};
use super::analysis::{mean_order, tree1_improves, ArmHalves};
use super::{CLIP_EPSILON, DEFAULT_ETA};
use crate::error::{Error, Result};
use crate::{derive_seed, rng_from_seed, SimRng};

/// Settings for the head-to-head reward simulation on a two-armed Bernoulli bandit.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardSimConfig {
    pub means: [f64; 2],
    pub horizon: usize,
    pub replications: usize,
    pub seed: u64,
    pub eta: f64,
    pub prior_alpha: f64,
    pub prior_beta: f64,
}

impl Default for RewardSimConfig {
    fn default() -> Self {
        Self {
            means: [0.6, 0.4],
            horizon: 2000,
            replications: 200,
            seed: 0,
            eta: DEFAULT_ETA,
            prior_alpha: 1.0,
            prior_beta: 1.0,
        }
    }
}

impl RewardSimConfig {
    pub fn validate(&self) -> Result<()> {
        for m in self.means {
            if !(0.0..=1.0).contains(&m) {
                return Err(Error::param("means", format!("{m} outside [0, 1]")));
            }
        }
        if self.horizon == 0 {
            return Err(Error::param("horizon", "must be at least 1"));
        }
        if self.replications == 0 {
            return Err(Error::param("replications", "must be at least 1"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::param("eta", format!("must lie in (0, 1], got {}", self.eta)));
        }
        posterior(self.prior_alpha, self.prior_beta, 0, 0).map(|_| ())
    }
}

/// Cumulative mean reward after each round, averaged over replications.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardCurves {
    pub thompson: Vec<f64>,
    pub early_stopping: Vec<f64>,
}

#[derive(Default)]
struct ArmCounts {
    successes: [u64; 2],
    pulls: [u64; 2],
}

impl ArmCounts {
    fn record(&mut self, arm: usize, reward: bool) {
        self.pulls[arm] += 1;
        self.successes[arm] += reward as u64;
    }
}

fn thompson_arm(counts: &ArmCounts, cfg: &RewardSimConfig, rng: &mut SimRng) -> Result<usize> {
    let draw = |arm: usize, rng: &mut SimRng| -> Result<f64> {
        let b: Beta<f64> = posterior(cfg.prior_alpha, cfg.prior_beta, counts.successes[arm], counts.pulls[arm])?;
        Ok(b.sample(rng))
    };
    let t1 = draw(0, rng)?;
    let t2 = draw(1, rng)?;
    Ok(match t1.partial_cmp(&t2) {
        Some(Ordering::Greater) => 0,
        Some(Ordering::Less) => 1,
        _ => coin(rng),
    })
}

/// Greedy choice over the two-step model refit on a fresh random split of
/// the whole history. Each arm sends `floor(N_i / 2)` samples to training;
/// arms with fewer than two samples cannot be split, so the round is played
/// uniformly.
fn early_stopping_arm(counts: &ArmCounts, eta: f64, rng: &mut SimRng) -> Result<usize> {
    if counts.pulls.iter().any(|&n| n < 2) {
        return Ok(coin(rng));
    }
    let mut arms = [ArmHalves { train_successes: 0, train_n: 0, val_successes: 0, val_n: 0 }; 2];
    for (i, arm) in arms.iter_mut().enumerate() {
        let (s, total) = (counts.successes[i], counts.pulls[i]);
        let n = total / 2;
        let k = hypergeometric(total, s, n)?.sample(rng);
        *arm = ArmHalves { train_successes: k, train_n: n, val_successes: s - k, val_n: total - n };
    }
    if !tree1_improves(&arms, eta, CLIP_EPSILON) {
        return Ok(coin(rng));
    }
    let [a, b] = &arms;
    Ok(match mean_order(a.train_successes, a.train_n, b.train_successes, b.train_n) {
        Ordering::Greater => 0,
        Ordering::Less => 1,
        Ordering::Equal => coin(rng),
    })
}

fn run_policy<F>(cfg: &RewardSimConfig, seed: u64, curve: &mut [f64], mut choose: F) -> Result<()>
where
    F: FnMut(&ArmCounts, &mut SimRng) -> Result<usize>,
{
    let mut rng = rng_from_seed(seed);
    let mut counts = ArmCounts::default();
    let mut total = 0u64;
    for (t, slot) in curve.iter_mut().enumerate() {
        let arm = choose(&counts, &mut rng)?;
        let reward = rng.random_bool(cfg.means[arm]);
        counts.record(arm, reward);
        total += reward as u64;
        *slot += total as f64 / (t + 1) as f64;
    }
    Ok(())
}

/// Runs Thompson Sampling and early-stopping greedy side by side. Every
/// replication gives each method its own seed stream.
pub fn simulate_reward_curves(cfg: &RewardSimConfig) -> Result<RewardCurves> {
    cfg.validate()?;
    let mut thompson = vec![0.0; cfg.horizon];
    let mut early_stopping = vec![0.0; cfg.horizon];
    for rep in 0..cfg.replications as u64 {
        run_policy(cfg, derive_seed(cfg.seed, 2 * rep), &mut thompson, |c, rng| thompson_arm(c, cfg, rng))?;
        run_policy(cfg, derive_seed(cfg.seed, 2 * rep + 1), &mut early_stopping, |c, rng| {
            early_stopping_arm(c, cfg.eta, rng)
        })?;
    }
    let reps = cfg.replications as f64;
    for v in thompson.iter_mut().chain(early_stopping.iter_mut()) {
        *v /= reps;
    }
    if thompson.iter().chain(&early_stopping).any(|v| !v.is_finite()) {
        return Err(Error::Degenerate("non-finite reward curve".into()));
    }
    Ok(RewardCurves { thompson, early_stopping })
}
