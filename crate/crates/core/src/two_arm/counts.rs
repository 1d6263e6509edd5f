use crate::error::{Error, Result};
use crate::stats::hypergeometric_pmf;

/// Success and pull counts for two Bernoulli arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoArmCounts {
    pub successes_1: u64,
    pub total_1: u64,
    pub successes_2: u64,
    pub total_2: u64,
}

impl TwoArmCounts {
    pub fn new(successes_1: u64, total_1: u64, successes_2: u64, total_2: u64) -> Result<Self> {
        if successes_1 > total_1 || successes_2 > total_2 {
            return Err(Error::InvalidCounts(format!(
                "successes exceed totals: {successes_1}/{total_1}, {successes_2}/{total_2}"
            )));
        }
        Ok(Self { successes_1, total_1, successes_2, total_2 })
    }

    /// Balanced splits need both totals even and positive.
    pub fn require_balanced(&self) -> Result<()> {
        if self.successes_1 > self.total_1 || self.successes_2 > self.total_2 {
            return Err(Error::InvalidCounts("successes exceed totals".into()));
        }
        for t in [self.total_1, self.total_2] {
            if t == 0 || t % 2 != 0 {
                return Err(Error::InvalidCounts(format!("total {t} is not a positive even number")));
            }
        }
        Ok(())
    }

    /// Per-arm size of each half, `n_i = N_i / 2`.
    pub fn half_sizes(&self) -> (u64, u64) {
        (self.total_1 / 2, self.total_2 / 2)
    }

    pub fn mean_1(&self) -> f64 {
        self.successes_1 as f64 / self.total_1 as f64
    }

    pub fn mean_2(&self) -> f64 {
        self.successes_2 as f64 / self.total_2 as f64
    }

    /// Full-sample difference `Delta = rbar_1 - rbar_2`.
    pub fn delta(&self) -> f64 {
        self.mean_1() - self.mean_2()
    }

    pub fn swapped(&self) -> Self {
        Self {
            successes_1: self.successes_2,
            total_1: self.total_2,
            successes_2: self.successes_1,
            total_2: self.total_1,
        }
    }

    /// Every feasible balanced split, ordered by training successes of arm 1 then arm 2.
    pub fn splits(&self) -> Result<Vec<BalancedSplit>> {
        self.require_balanced()?;
        let r1 = arm_range(self.successes_1, self.total_1);
        let r2 = arm_range(self.successes_2, self.total_2);
        Ok(r1
            .flat_map(|k1| r2.clone().map(move |k2| BalancedSplit { train_successes_1: k1, train_successes_2: k2 }))
            .collect())
    }

    /// Probability of `split` when each arm's samples are halved uniformly at
    /// random: a product of two hypergeometric probabilities.
    pub fn split_probability(&self, split: &BalancedSplit) -> Result<f64> {
        split.validate(self)?;
        let (n1, n2) = self.half_sizes();
        Ok(hypergeometric_pmf(self.total_1, self.successes_1, n1, split.train_successes_1)
            * hypergeometric_pmf(self.total_2, self.successes_2, n2, split.train_successes_2))
    }
}

/// Feasible training-success counts for one arm with `s` successes out of `total`.
pub(crate) fn arm_range(s: u64, total: u64) -> std::ops::RangeInclusive<u64> {
    let n = total / 2;
    s.saturating_sub(total - n)..=s.min(n)
}

/// A balanced train/validation split; with binary rewards it is fully
/// described by how many successes of each arm land in the training half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BalancedSplit {
    pub train_successes_1: u64,
    pub train_successes_2: u64,
}

impl BalancedSplit {
    pub fn validate(&self, counts: &TwoArmCounts) -> Result<()> {
        counts.require_balanced()?;
        let (n1, n2) = counts.half_sizes();
        for (k, s, n, total) in [
            (self.train_successes_1, counts.successes_1, n1, counts.total_1),
            (self.train_successes_2, counts.successes_2, n2, counts.total_2),
        ] {
            if k > s || k > n || n - k > total - s {
                return Err(Error::InvalidSplit(format!("{k} training successes infeasible for {s}/{total}")));
            }
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        Self { train_successes_1: self.train_successes_2, train_successes_2: self.train_successes_1 }
    }
}

/// Means and differences induced by a balanced split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitStats {
    pub delta: f64,
    pub delta_tr: f64,
    pub delta_val: f64,
    pub rbar_tr: f64,
    pub rbar_tr_1: f64,
    pub rbar_tr_2: f64,
    pub rbar_val_1: f64,
    pub rbar_val_2: f64,
}

impl SplitStats {
    pub fn new(counts: &TwoArmCounts, split: &BalancedSplit) -> Result<Self> {
        split.validate(counts)?;
        let (n1, n2) = counts.half_sizes();
        let (k1, k2) = (split.train_successes_1, split.train_successes_2);
        let rbar_tr_1 = k1 as f64 / n1 as f64;
        let rbar_tr_2 = k2 as f64 / n2 as f64;
        let rbar_val_1 = (counts.successes_1 - k1) as f64 / n1 as f64;
        let rbar_val_2 = (counts.successes_2 - k2) as f64 / n2 as f64;
        Ok(Self {
            delta: counts.delta(),
            delta_tr: rbar_tr_1 - rbar_tr_2,
            delta_val: rbar_val_1 - rbar_val_2,
            rbar_tr: (k1 + k2) as f64 / (n1 + n2) as f64,
            rbar_tr_1,
            rbar_tr_2,
            rbar_val_1,
            rbar_val_2,
        })
    }
}
