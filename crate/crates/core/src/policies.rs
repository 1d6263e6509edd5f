//! Action-selection rules. Each maps reward estimates to an explicit
//! probability distribution over actions; sampling is a separate step so the
//! distributions themselves can be inspected and tested.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::rng_from_seed;

/// Tolerance on the total probability mass.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Probabilities over `K` actions.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDistribution {
    probabilities: Vec<f64>,
}

impl ActionDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::InvalidDistribution("no actions".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("entry {p} is not a probability")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { probabilities })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDistribution("no actions".into()));
        }
        Ok(Self { probabilities: vec![1.0 / k as f64; k] })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn prob(&self, action: usize) -> f64 {
        self.probabilities[action]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Greedy,
    EpsilonGreedy,
    Falcon,
    Exp,
    Thompson,
}

impl PolicyKind {
    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Greedy => "greedy",
            PolicyKind::EpsilonGreedy => "epsilon_greedy",
            PolicyKind::Falcon => "falcon",
            PolicyKind::Exp => "exp",
            PolicyKind::Thompson => "thompson",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [PolicyKind::Greedy, PolicyKind::EpsilonGreedy, PolicyKind::Falcon, PolicyKind::Exp, PolicyKind::Thompson]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::param("policy", format!("unknown policy `{s}`")))
    }
}

/// Policy choice with the parameters of every kind; only those of `kind` are used.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub epsilon: f64,
    /// Scale `c` in `gamma(n) = c sqrt(K n)`.
    pub falcon_c: f64,
    /// Inverse temperature of the EXP softmax (not the boosting learning rate).
    pub exp_temperature: f64,
    pub ts_prior_alpha: f64,
    pub ts_prior_beta: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            kind: PolicyKind::Greedy,
            epsilon: 0.1,
            falcon_c: 1.0,
            exp_temperature: 10.0,
            ts_prior_alpha: 1.0,
            ts_prior_beta: 1.0,
        }
    }
}

impl PolicyConfig {
    pub fn greedy() -> Self {
        Self::default()
    }

    pub fn with_kind(kind: PolicyKind) -> Self {
        Self { kind, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            PolicyKind::Greedy => Ok(()),
            PolicyKind::EpsilonGreedy => check_epsilon(self.epsilon),
            PolicyKind::Falcon => {
                if self.falcon_c > 0.0 && self.falcon_c.is_finite() {
                    Ok(())
                } else {
                    Err(Error::param("falcon_c", format!("must be positive, got {}", self.falcon_c)))
                }
            }
            PolicyKind::Exp => check_temperature(self.exp_temperature),
            PolicyKind::Thompson => check_prior(self.ts_prior_alpha, self.ts_prior_beta),
        }
    }

    /// Distribution for model-based kinds; `buffer_len` is the number of
    /// training records behind the estimates. Thompson Sampling needs
    /// per-arm counts instead and is rejected here.
    pub fn distribution(&self, estimates: &[f64], buffer_len: usize) -> Result<ActionDistribution> {
        self.validate()?;
        match self.kind {
            PolicyKind::Greedy => greedy_distribution(estimates),
            PolicyKind::EpsilonGreedy => epsilon_greedy_distribution(estimates, self.epsilon),
            PolicyKind::Falcon => {
                falcon_distribution(estimates, falcon_gamma(buffer_len, estimates.len(), self.falcon_c)?)
            }
            PolicyKind::Exp => exp_distribution(estimates, self.exp_temperature),
            PolicyKind::Thompson => Err(Error::param("policy", "thompson needs per-arm counts, not estimates")),
        }
    }
}

fn check_estimates(estimates: &[f64]) -> Result<()> {
    if estimates.is_empty() {
        return Err(Error::InvalidDistribution("no actions".into()));
    }
    if let Some(e) = estimates.iter().find(|e| !e.is_finite()) {
        return Err(Error::param("estimates", format!("non-finite estimate {e}")));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if (0.0..=1.0).contains(&epsilon) {
        Ok(())
    } else {
        Err(Error::param("epsilon", format!("must lie in [0, 1], got {epsilon}")))
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::param("exp_temperature", format!("must be finite and non-negative, got {t}")))
    }
}

fn check_prior(alpha: f64, beta: f64) -> Result<()> {
    if alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::param("prior", format!("Beta({alpha}, {beta}) needs positive parameters")))
    }
}

/// Uniform over the argmax set.
pub fn greedy_distribution(estimates: &[f64]) -> Result<ActionDistribution> {
    check_estimates(estimates)?;
    let max = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties = estimates.iter().filter(|&&e| e == max).count() as f64;
    Ok(ActionDistribution {
        probabilities: estimates.iter().map(|&e| if e == max { 1.0 / ties } else { 0.0 }).collect(),
    })
}

pub fn epsilon_greedy_distribution(estimates: &[f64], epsilon: f64) -> Result<ActionDistribution> {
    check_epsilon(epsilon)?;
    let greedy = greedy_distribution(estimates)?;
    let u = epsilon / estimates.len() as f64;
    Ok(ActionDistribution {
        probabilities: greedy.probabilities.iter().map(|g| u + (1.0 - epsilon) * g).collect(),
    })
}

/// `c sqrt(K n)`.
pub fn falcon_gamma(n: usize, k: usize, c: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::param("k", "need at least one action"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param("falcon_c", format!("must be positive, got {c}")));
    }
    Ok(c * ((k * n) as f64).sqrt())
}

/// Inverse-gap weighting: every action other than the first maximizer gets
/// `1 / (K + gamma (max - r_a))`; the first maximizer takes what is left.
pub fn falcon_distribution(estimates: &[f64], gamma: f64) -> Result<ActionDistribution> {
    check_estimates(estimates)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::param("gamma", format!("must be finite and non-negative, got {gamma}")));
    }
    let k = estimates.len() as f64;
    let (best, max) = estimates
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, e)| if e > acc.1 { (i, e) } else { acc });
    let mut probabilities: Vec<f64> = estimates.iter().map(|&e| 1.0 / (k + gamma * (max - e))).collect();
    probabilities[best] = 0.0;
    let rest: f64 = probabilities.iter().sum();
    debug_assert!(rest <= 1.0 - 1.0 / k + 1e-12);
    probabilities[best] = 1.0 - rest;
    Ok(ActionDistribution { probabilities })
}

/// Softmax of `temperature * estimates`.
pub fn exp_distribution(estimates: &[f64], temperature: f64) -> Result<ActionDistribution> {
    check_estimates(estimates)?;
    check_temperature(temperature)?;
    let max = estimates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = estimates.iter().map(|&e| (temperature * (e - max)).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(ActionDistribution { probabilities: weights.into_iter().map(|w| w / total).collect() })
}

fn posteriors(successes: &[u64], failures: &[u64], alpha: f64, beta: f64) -> Result<Vec<Beta<f64>>> {
    check_prior(alpha, beta)?;
    if successes.is_empty() || successes.len() != failures.len() {
        return Err(Error::LengthMismatch { expected: successes.len(), actual: failures.len() });
    }
    successes
        .iter()
        .zip(failures)
        .map(|(&s, &f)| {
            Beta::new(alpha + s as f64, beta + f as f64).map_err(|e| Error::InvalidDistribution(e.to_string()))
        })
        .collect()
}

fn argmax_draw<R: Rng + ?Sized>(posteriors: &[Beta<f64>], rng: &mut R) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, b) in posteriors.iter().enumerate() {
        let theta = b.sample(rng);
        if theta > best.1 {
            best = (i, theta);
        }
    }
    best.0
}

/// Monte-Carlo estimate of each arm's posterior probability of being best.
pub fn thompson_mab_distribution(
    successes: &[u64],
    failures: &[u64],
    prior_alpha: f64,
    prior_beta: f64,
    n_draws: usize,
    seed: u64,
) -> Result<ActionDistribution> {
    let post = posteriors(successes, failures, prior_alpha, prior_beta)?;
    if n_draws == 0 {
        return Err(Error::param("n_draws", "must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let mut wins = vec![0u64; post.len()];
    for _ in 0..n_draws {
        wins[argmax_draw(&post, &mut rng)] += 1;
    }
    Ok(ActionDistribution { probabilities: wins.iter().map(|&w| w as f64 / n_draws as f64).collect() })
}

/// One Thompson Sampling decision: a single posterior draw per arm, then argmax.
pub fn thompson_draw<R: Rng + ?Sized>(
    successes: &[u64],
    failures: &[u64],
    prior_alpha: f64,
    prior_beta: f64,
    rng: &mut R,
) -> Result<usize> {
    Ok(argmax_draw(&posteriors(successes, failures, prior_alpha, prior_beta)?, rng))
}

/// Inverse-CDF draw from one uniform variate.
pub fn sample_action<R: Rng + ?Sized>(distribution: &ActionDistribution, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    let mut last_positive = 0;
    for (i, &p) in distribution.probabilities.iter().enumerate() {
        if p > 0.0 {
            cumulative += p;
            last_positive = i;
            if u < cumulative {
                return i;
            }
        }
    }
    last_positive
}
