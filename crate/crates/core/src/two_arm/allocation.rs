use std::cmp::Ordering;

use rand::Rng;
use rand_distr::{Beta, Distribution, Hypergeometric};

use super::analysis::{mean_order, tree1_improves, ArmHalves};
use super::counts::{arm_range, TwoArmCounts};
use super::CLIP_EPSILON;
use crate::error::{Error, Result};
use crate::stats::hypergeometric_pmf;
use crate::rng_from_seed;

/// Enumeration is refused beyond this many balanced splits.
pub const MAX_ENUMERATED_SPLITS: u64 = 50_000_000;

/// Probability of pulling each arm at the next decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Allocation {
    pub arm_1: f64,
    pub arm_2: f64,
}

impl Allocation {
    pub const UNIFORM: Self = Self { arm_1: 0.5, arm_2: 0.5 };
}

/// Allocation induced by greedy selection over the early-stopped model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarlyStopAllocation {
    pub allocation: Allocation,
    pub accept_probability: f64,
}

/// Mass placed on arm 1 for one split: all of it to the arm with the larger
/// training mean if `Tree_1` is kept, half otherwise.
fn arm1_share(arms: &[ArmHalves; 2], eta: f64) -> (f64, bool) {
    if !tree1_improves(arms, eta, CLIP_EPSILON) {
        return (0.5, false);
    }
    let [a, b] = arms;
    let share = match mean_order(a.train_successes, a.train_n, b.train_successes, b.train_n) {
        Ordering::Greater => 1.0,
        Ordering::Less => 0.0,
        Ordering::Equal => 0.5,
    };
    (share, true)
}

fn halves(s: u64, total: u64, k: u64) -> ArmHalves {
    let n = total / 2;
    ArmHalves { train_successes: k, train_n: n, val_successes: s - k, val_n: total - n }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::param("eta", format!("must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

/// Exact allocation: every balanced split weighted by its hypergeometric
/// probability.
pub fn allocation_prob_exhaustive(counts: &TwoArmCounts, eta: f64) -> Result<EarlyStopAllocation> {
    check_eta(eta)?;
    counts.require_balanced()?;
    let (n1, n2) = counts.half_sizes();
    let r1 = arm_range(counts.successes_1, counts.total_1);
    let r2 = arm_range(counts.successes_2, counts.total_2);
    let size = (r1.end() - r1.start() + 1).saturating_mul(r2.end() - r2.start() + 1);
    if size > MAX_ENUMERATED_SPLITS {
        return Err(Error::TooLarge(format!("{size} balanced splits")));
    }
    let w2: Vec<(u64, f64)> = r2
        .map(|k2| (k2, hypergeometric_pmf(counts.total_2, counts.successes_2, n2, k2)))
        .collect();
    let (mut total, mut arm1, mut accept) = (0.0, 0.0, 0.0);
    for k1 in r1 {
        let w1 = hypergeometric_pmf(counts.total_1, counts.successes_1, n1, k1);
        let a = halves(counts.successes_1, counts.total_1, k1);
        for &(k2, w2) in &w2 {
            let w = w1 * w2;
            let (share, kept) = arm1_share(&[a, halves(counts.successes_2, counts.total_2, k2)], eta);
            total += w;
            arm1 += w * share;
            if kept {
                accept += w;
            }
        }
    }
    let arm_1 = arm1 / total;
    Ok(EarlyStopAllocation {
        allocation: Allocation { arm_1, arm_2: 1.0 - arm_1 },
        accept_probability: accept / total,
    })
}

/// Monte-Carlo allocation over `n_sims` uniformly random balanced splits.
pub fn allocation_prob_montecarlo(
    counts: &TwoArmCounts,
    eta: f64,
    n_sims: u64,
    seed: u64,
) -> Result<EarlyStopAllocation> {
    check_eta(eta)?;
    counts.require_balanced()?;
    if n_sims == 0 {
        return Err(Error::param("n_sims", "must be at least 1"));
    }
    let (n1, n2) = counts.half_sizes();
    let h1 = hypergeometric(counts.total_1, counts.successes_1, n1)?;
    let h2 = hypergeometric(counts.total_2, counts.successes_2, n2)?;
    let mut rng = rng_from_seed(seed);
    let (mut arm1, mut accepted) = (0.0, 0u64);
    for _ in 0..n_sims {
        let k1 = h1.sample(&mut rng);
        let k2 = h2.sample(&mut rng);
        let arms = [halves(counts.successes_1, counts.total_1, k1), halves(counts.successes_2, counts.total_2, k2)];
        let (share, kept) = arm1_share(&arms, eta);
        arm1 += share;
        accepted += kept as u64;
    }
    let arm_1 = arm1 / n_sims as f64;
    Ok(EarlyStopAllocation {
        allocation: Allocation { arm_1, arm_2: 1.0 - arm_1 },
        accept_probability: accepted as f64 / n_sims as f64,
    })
}

pub(crate) fn hypergeometric(population: u64, successes: u64, draws: u64) -> Result<Hypergeometric> {
    Hypergeometric::new(population, successes, draws).map_err(|e| Error::InvalidCounts(e.to_string()))
}

/// Thompson Sampling's allocation: the posterior probability that each arm
/// has the larger mean under independent Beta posteriors.
pub fn ts_allocation_prob(
    counts: &TwoArmCounts,
    prior_alpha: f64,
    prior_beta: f64,
    n_sims: u64,
    seed: u64,
) -> Result<Allocation> {
    let b1 = posterior(prior_alpha, prior_beta, counts.successes_1, counts.total_1)?;
    let b2 = posterior(prior_alpha, prior_beta, counts.successes_2, counts.total_2)?;
    if n_sims == 0 {
        return Err(Error::param("n_sims", "must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let mut arm1 = 0.0;
    for _ in 0..n_sims {
        let (t1, t2): (f64, f64) = (b1.sample(&mut rng), b2.sample(&mut rng));
        arm1 += match t1.partial_cmp(&t2) {
            Some(Ordering::Greater) => 1.0,
            Some(Ordering::Less) => 0.0,
            _ => 0.5,
        };
    }
    let arm_1 = arm1 / n_sims as f64;
    Ok(Allocation { arm_1, arm_2: 1.0 - arm_1 })
}

pub(crate) fn posterior(alpha: f64, beta: f64, successes: u64, total: u64) -> Result<Beta<f64>> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(Error::param("prior", format!("Beta({alpha}, {beta}) needs positive finite parameters")));
    }
    if successes > total {
        return Err(Error::InvalidCounts(format!("{successes} successes out of {total}")));
    }
    Beta::new(alpha + successes as f64, beta + (total - successes) as f64)
        .map_err(|e| Error::InvalidDistribution(e.to_string()))
}

/// Uniform random draw used to break ties between arms.
pub(crate) fn coin<R: Rng + ?Sized>(rng: &mut R) -> usize {
    rng.random_range(0..2)
}
