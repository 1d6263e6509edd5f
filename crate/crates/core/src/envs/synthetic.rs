use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use super::EnvironmentConfig;
use crate::error::{Error, Result};
use crate::gbt::{train_fixed_rounds, BoostedModel, Dataset, TrainConfig};
use crate::{derive_seed, rng_from_seed};

/// Clipping applied to ground-truth means.
pub const TRUTH_CLIP: f64 = 1e-6;

/// Finite pool of contexts, sampled uniformly with replacement.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextPool {
    dim: usize,
    values: Vec<f64>,
}

impl ContextPool {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || values.is_empty() || values.len() % dim != 0 {
            return Err(Error::param("contexts", "need a non-empty list of equal-length vectors"));
        }
        Ok(Self { dim, values })
    }

    /// `size` contexts with independent uniform features on `[0, 1)`.
    pub fn uniform<R: Rng + ?Sized>(dim: usize, size: usize, rng: &mut R) -> Result<Self> {
        Self::new(dim, (0..dim * size).map(|_| rng.random()).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.len())
    }
}

/// The `K` available actions as feature vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionBank {
    dim: usize,
    values: Vec<f64>,
}

impl ActionBank {
    pub fn new(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || values.len() % dim != 0 || values.len() / dim < 2 {
            return Err(Error::param("actions", "need at least two equal-length action vectors"));
        }
        Ok(Self { dim, values })
    }

    /// Full grid over attributes with the given numbers of levels. Each
    /// attribute is scaled to `[0, 1]`; with two or more attributes two
    /// composite features follow: the product of the first and last
    /// attribute and the absolute difference of the first two.
    pub fn grid(levels: &[usize]) -> Result<Self> {
        if levels.is_empty() || levels.contains(&0) {
            return Err(Error::param("action_levels", "every attribute needs at least one level"));
        }
        let k: usize = levels.iter().product();
        let mut values = Vec::new();
        let mut dim = 0;
        for mut code in 0..k {
            let attrs: Vec<f64> = levels
                .iter()
                .map(|&l| {
                    let level = code % l;
                    code /= l;
                    if l > 1 { level as f64 / (l - 1) as f64 } else { 0.0 }
                })
                .collect();
            let mut row = attrs.clone();
            if attrs.len() >= 2 {
                row.push(attrs[0] * attrs[attrs.len() - 1]);
                row.push((attrs[0] - attrs[1]).abs());
            }
            dim = row.len();
            values.extend(row);
        }
        Self::new(dim, values)
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize) -> &[f64] {
        &self.values[a * self.dim..(a + 1) * self.dim]
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Gate {
    /// `[x_c > tau] - 1/2`
    Step { context: usize, tau: f64 },
    /// `x_c - 1/2`
    Linear { context: usize },
    /// Context-free preference.
    Always,
}

#[derive(Debug, Clone, PartialEq)]
struct Term {
    gate: Gate,
    action_feature: usize,
    weight: f64,
}

/// Success probability `sigmoid(bias + signal * sum_j w_j g_j(x) (2 a_j - 1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentFunction {
    bias: f64,
    signal: f64,
    terms: Vec<Term>,
}

impl LatentFunction {
    /// Random interaction terms; the first term is a context-free action
    /// preference so some actions are better on average.
    pub fn random<R: Rng + ?Sized>(context_dim: usize, action_dim: usize, n_terms: usize, signal: f64, rng: &mut R) -> Self {
        let terms = (0..n_terms)
            .map(|j| {
                let context = rng.random_range(0..context_dim);
                let gate = match j {
                    0 => Gate::Always,
                    _ if j % 2 == 1 => Gate::Step { context, tau: rng.random_range(0.25..0.75) },
                    _ => Gate::Linear { context },
                };
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                Term { gate, action_feature: rng.random_range(0..action_dim), weight: sign * rng.random_range(0.5..1.5) }
            })
            .collect();
        Self { bias: 0.0, signal, terms }
    }

    fn logit(&self, x: &[f64], a: &[f64]) -> f64 {
        let s: f64 = self
            .terms
            .iter()
            .map(|t| {
                let g = match t.gate {
                    Gate::Step { context, tau } => {
                        if x[context] > tau { 0.5 } else { -0.5 }
                    }
                    Gate::Linear { context } => x[context] - 0.5,
                    Gate::Always => 0.5,
                };
                t.weight * g * (2.0 * a[t.action_feature] - 1.0)
            })
            .sum();
        self.bias + self.signal * s
    }

    pub fn probability(&self, x: &[f64], a: &[f64]) -> f64 {
        1.0 / (1.0 + (-self.logit(x, a)).exp())
    }

    /// Sets the bias so the mean probability over `rows` equals `target`.
    fn calibrate(&mut self, rows: &[(&[f64], &[f64])], target: f64) {
        let mean = |f: &Self| rows.iter().map(|(x, a)| f.probability(x, a)).sum::<f64>() / rows.len() as f64;
        let (mut lo, mut hi) = (-30.0, 30.0);
        for _ in 0..100 {
            self.bias = 0.5 * (lo + hi);
            if mean(self) < target {
                lo = self.bias;
            } else {
                hi = self.bias;
            }
        }
    }
}

/// Logged `(context, action, label)` rows the ground truth is fitted on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTable {
    pub contexts: Vec<usize>,
    pub actions: Vec<usize>,
    pub labels: Vec<bool>,
}

impl LabelTable {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&l| l).count()
    }

    pub fn mean_label(&self) -> f64 {
        self.positives() as f64 / self.len() as f64
    }

    pub fn to_dataset(&self, pool: &ContextPool, bank: &ActionBank) -> Result<Dataset> {
        let mut data = Dataset::with_capacity(pool.dim() + bank.dim(), self.len());
        for i in 0..self.len() {
            data.push_concat(pool.get(self.contexts[i]), bank.get(self.actions[i]), self.labels[i] as u8 as f64)?;
        }
        Ok(data)
    }

    /// CSV with the row's context and action indices, their features, and the label.
    pub fn to_csv(&self, pool: &ContextPool, bank: &ActionBank) -> String {
        let mut out = String::from("context,action");
        for j in 0..pool.dim() {
            let _ = write!(out, ",x{j}");
        }
        for j in 0..bank.dim() {
            let _ = write!(out, ",a{j}");
        }
        out.push_str(",label\n");
        for i in 0..self.len() {
            let _ = write!(out, "{},{}", self.contexts[i], self.actions[i]);
            for v in pool.get(self.contexts[i]).iter().chain(bank.get(self.actions[i])) {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{}", self.labels[i] as u8);
        }
        out
    }
}

/// A fitted mean-reward model with its values cached for every
/// `(context, action)` pair of the pool and bank.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthModel {
    model: BoostedModel,
    n_actions: usize,
    means: Vec<f64>,
}

impl GroundTruthModel {
    pub fn from_model(model: BoostedModel, pool: &ContextPool, bank: &ActionBank) -> Result<Self> {
        let mut means = Vec::with_capacity(pool.len() * bank.len());
        let mut x = Vec::with_capacity(pool.dim() + bank.dim());
        for c in 0..pool.len() {
            for a in 0..bank.len() {
                x.clear();
                x.extend_from_slice(pool.get(c));
                x.extend_from_slice(bank.get(a));
                means.push(model.predict(&x, TRUTH_CLIP)?);
            }
        }
        Ok(Self { model, n_actions: bank.len(), means })
    }

    /// Boost for `rounds` rounds on the label table.
    pub fn fit(
        pool: &ContextPool,
        bank: &ActionBank,
        labels: &LabelTable,
        fit: &TrainConfig,
        rounds: usize,
    ) -> Result<Self> {
        let model = train_fixed_rounds(&labels.to_dataset(pool, bank)?, fit, rounds)?;
        Self::from_model(model, pool, bank)
    }

    pub fn model(&self) -> &BoostedModel {
        &self.model
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    /// Mean reward of `action` in pool context `context`.
    pub fn mean(&self, context: usize, action: usize) -> f64 {
        self.means[context * self.n_actions + action]
    }

    pub fn means_for(&self, context: usize) -> &[f64] {
        &self.means[context * self.n_actions..(context + 1) * self.n_actions]
    }

    pub fn n_contexts(&self) -> usize {
        self.means.len() / self.n_actions
    }
}

/// A generated environment before any drift is applied.
#[derive(Debug, Clone)]
pub struct SyntheticTruth {
    pub pool: ContextPool,
    pub bank: ActionBank,
    pub latent: LatentFunction,
    pub labels: LabelTable,
    pub model: GroundTruthModel,
    pub fit: TrainConfig,
    pub rounds: usize,
}

pub fn build_synthetic_truth(config: &EnvironmentConfig) -> Result<SyntheticTruth> {
    config.validate()?;
    let mut rng = rng_from_seed(derive_seed(config.seed, 1));
    let pool = ContextPool::uniform(config.context_dim, config.pool_size, &mut rng)?;
    let bank = ActionBank::grid(&config.action_levels)?;
    let mut latent = LatentFunction::random(config.context_dim, bank.dim(), config.latent_terms, config.signal, &mut rng);

    let contexts: Vec<usize> = (0..config.label_rows).map(|_| pool.sample_index(&mut rng)).collect();
    // every action appears equally often, in random order
    let mut actions: Vec<usize> = (0..config.label_rows).map(|i| i % bank.len()).collect();
    actions.shuffle(&mut rng);
    let rows: Vec<(&[f64], &[f64])> = contexts.iter().zip(&actions).map(|(&c, &a)| (pool.get(c), bank.get(a))).collect();
    latent.calibrate(&rows, config.target_mean);
    let labels: Vec<bool> = rows.iter().map(|(x, a)| rng.random_bool(latent.probability(x, a))).collect();
    let labels = LabelTable { contexts, actions, labels };

    let model = GroundTruthModel::fit(&pool, &bank, &labels, &config.truth_fit, config.truth_rounds)?;
    Ok(SyntheticTruth { pool, bank, latent, labels, model, fit: config.truth_fit.clone(), rounds: config.truth_rounds })
}
