//! The simplified two-step boosting procedure in the two-armed Bernoulli
//! bandit.
//!
//! With the arm indicator as the only feature, boosting starts from
//! `Tree_0 = mean training reward` and the next tree necessarily splits on the
//! arm, shifting each arm's prediction towards its own training mean. The
//! validation log-loss decides whether `Tree_1` is kept: keeping it makes the
//! greedy policy exploit the arm with the larger training mean, rejecting it
//! leaves both arms tied, which means uniform exploration. The probability of
//! acceptance, driven purely by the random balanced split, plays the role of
//! a p-value and closely tracks Thompson Sampling's allocation.

mod allocation;
mod analysis;
mod counts;
mod reward;
mod theory;

pub use allocation::{
    allocation_prob_exhaustive, allocation_prob_montecarlo, ts_allocation_prob, Allocation, EarlyStopAllocation,
};
pub use analysis::{
    accept_tree1, build_two_step, check_equivalence, loss_derivative_at_zero, two_arm_log_loss, EquivalenceIndicators,
    TwoStepModel,
};
pub use counts::{BalancedSplit, SplitStats, TwoArmCounts};
pub use reward::{simulate_reward_curves, RewardCurves, RewardSimConfig};
pub use theory::{
    one_sided_pvalue, sample_standardized_delta_tr, sigma_delta, two_sided_pvalue, HypothesisParams,
};

/// Learning rate used by the two-arm analysis unless stated otherwise.
pub const DEFAULT_ETA: f64 = 0.01;

/// Clipping applied to predictions before taking logs.
pub const CLIP_EPSILON: f64 = 1e-6;
