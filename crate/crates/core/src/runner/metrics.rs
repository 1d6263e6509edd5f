use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Per-epoch metrics of one replication. Cumulative values start after burn-in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRow {
    pub replication: usize,
    pub epoch: usize,
    pub cum_reward: u64,
    pub cum_regret: f64,
    /// Mean regret per round within the epoch.
    pub mean_regret: f64,
    pub stop_iteration: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsLog {
    pub rows: Vec<EpochRow>,
}

pub const CSV_HEADER: &str = "replication,epoch,cum_reward,cum_regret,mean_regret,stop_iteration";

impl MetricsLog {
    /// Rows of one replication in epoch order.
    pub fn replication(&self, r: usize) -> Vec<EpochRow> {
        let mut rows: Vec<EpochRow> = self.rows.iter().filter(|row| row.replication == r).copied().collect();
        rows.sort_by_key(|row| row.epoch);
        rows
    }

    pub fn replications(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.rows.iter().map(|row| row.replication).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    /// Reward collected in each epoch of replication `r`.
    pub fn epoch_rewards(&self, r: usize) -> Vec<u64> {
        let rows = self.replication(r);
        let mut prev = 0;
        rows.iter()
            .map(|row| {
                let d = row.cum_reward - prev;
                prev = row.cum_reward;
                d
            })
            .collect()
    }

    /// CSV sorted by replication then epoch; reals use `format`.
    pub fn to_csv(&self, format: impl Fn(f64) -> String) -> String {
        let mut rows = self.rows.clone();
        rows.sort_by_key(|r| (r.replication, r.epoch));
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.replication,
                r.epoch,
                r.cum_reward,
                format(r.cum_regret),
                format(r.mean_regret),
                r.stop_iteration
            );
        }
        out
    }
}

/// Pointwise mean and standard error across replications.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SeriesSummary {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateCurves {
    pub epochs: Vec<usize>,
    pub replications: usize,
    pub cum_reward: SeriesSummary,
    pub cum_regret: SeriesSummary,
    pub mean_regret: SeriesSummary,
    pub stop_iteration: SeriesSummary,
}

fn summarize(columns: &[Vec<f64>]) -> SeriesSummary {
    let mut s = SeriesSummary::default();
    for col in columns {
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let stderr = if col.len() > 1 {
            (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        s.mean.push(mean);
        s.stderr.push(stderr);
    }
    s
}

/// Every replication must cover the same epochs.
pub fn aggregate_replications(log: &MetricsLog) -> Result<AggregateCurves> {
    let mut by_epoch: BTreeMap<usize, Vec<EpochRow>> = BTreeMap::new();
    for row in &log.rows {
        by_epoch.entry(row.epoch).or_default().push(*row);
    }
    let reps = log.replications();
    if reps.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if by_epoch.values().any(|rows| rows.len() != reps.len()) {
        return Err(Error::InvalidCounts("replications cover different epochs".into()));
    }
    let column = |f: &dyn Fn(&EpochRow) -> f64| -> Vec<Vec<f64>> {
        by_epoch.values().map(|rows| rows.iter().map(f).collect()).collect()
    };
    Ok(AggregateCurves {
        epochs: by_epoch.keys().copied().collect(),
        replications: reps.len(),
        cum_reward: summarize(&column(&|r| r.cum_reward as f64)),
        cum_regret: summarize(&column(&|r| r.cum_regret)),
        mean_regret: summarize(&column(&|r| r.mean_regret)),
        stop_iteration: summarize(&column(&|r| r.stop_iteration as f64)),
    })
}
