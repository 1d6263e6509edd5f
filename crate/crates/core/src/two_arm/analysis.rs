use std::cmp::Ordering;

use super::counts::{BalancedSplit, SplitStats, TwoArmCounts};
use super::CLIP_EPSILON;
use crate::error::{Error, Result};

/// Predictions of `F_0 = Tree_0` and `F_1 = Tree_0 + eta * Tree_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStepModel {
    pub tree0_prediction: f64,
    pub p_1: f64,
    pub p_2: f64,
    pub learning_rate: f64,
}

/// Training and validation sizes of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ArmHalves {
    pub train_successes: u64,
    pub train_n: u64,
    pub val_successes: u64,
    pub val_n: u64,
}

impl ArmHalves {
    fn balanced(successes: u64, total: u64, train_successes: u64) -> Self {
        let n = total / 2;
        Self { train_successes, train_n: n, val_successes: successes - train_successes, val_n: total - n }
    }
}

fn balanced_halves(counts: &TwoArmCounts, split: &BalancedSplit) -> Result<[ArmHalves; 2]> {
    split.validate(counts)?;
    Ok([
        ArmHalves::balanced(counts.successes_1, counts.total_1, split.train_successes_1),
        ArmHalves::balanced(counts.successes_2, counts.total_2, split.train_successes_2),
    ])
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::param("eta", format!("must lie in (0, 1], got {eta}")));
    }
    Ok(())
}

/// Sign of `k1/n1 - k2/n2`, computed exactly.
pub(crate) fn mean_order(k1: u64, n1: u64, k2: u64, n2: u64) -> Ordering {
    (k1 as u128 * n2 as u128).cmp(&(k2 as u128 * n1 as u128))
}

/// `(r_tr, p_1, p_2)`. When the training means coincide no split reduces the
/// training error, so `Tree_1` is identically zero.
fn two_step_predictions(arms: &[ArmHalves; 2], eta: f64) -> (f64, f64, f64) {
    let [a, b] = arms;
    let r_tr = (a.train_successes + b.train_successes) as f64 / (a.train_n + b.train_n) as f64;
    if mean_order(a.train_successes, a.train_n, b.train_successes, b.train_n) == Ordering::Equal {
        return (r_tr, r_tr, r_tr);
    }
    let r1 = a.train_successes as f64 / a.train_n as f64;
    let r2 = b.train_successes as f64 / b.train_n as f64;
    (r_tr, r_tr + eta * (r1 - r_tr), r_tr + eta * (r2 - r_tr))
}

/// Whether `F_1` has strictly lower validation log-loss than `F_0`.
///
/// Evaluates `L_0 - L_1` (scaled by the validation size) as a sum of log
/// ratios so that small learning rates do not drown the difference in
/// rounding error.
pub(crate) fn tree1_improves(arms: &[ArmHalves; 2], eta: f64, clip: f64) -> bool {
    let [a, b] = arms;
    if mean_order(a.train_successes, a.train_n, b.train_successes, b.train_n) == Ordering::Equal {
        return false;
    }
    let (r_tr, p1, p2) = two_step_predictions(arms, eta);
    let p0 = r_tr.clamp(clip, 1.0 - clip);
    let gain = |arm: &ArmHalves, p: f64| {
        let p = p.clamp(clip, 1.0 - clip);
        let s = arm.val_successes as f64;
        let f = (arm.val_n - arm.val_successes) as f64;
        s * ((p - p0) / p0).ln_1p() + f * ((p0 - p) / (1.0 - p0)).ln_1p()
    };
    gain(a, p1) + gain(b, p2) > 0.0
}

pub fn build_two_step(split: &BalancedSplit, counts: &TwoArmCounts, eta: f64) -> Result<TwoStepModel> {
    check_eta(eta)?;
    let arms = balanced_halves(counts, split)?;
    let (tree0_prediction, p_1, p_2) = two_step_predictions(&arms, eta);
    Ok(TwoStepModel { tree0_prediction, p_1, p_2, learning_rate: eta })
}

/// Mean validation log-loss of per-arm predictions `p_1`, `p_2`.
pub fn two_arm_log_loss(p_1: f64, p_2: f64, val_successes: [u64; 2], n_1: u64, n_2: u64) -> Result<f64> {
    for p in [p_1, p_2] {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param("p", format!("prediction {p} must lie strictly inside (0, 1)")));
        }
    }
    if val_successes[0] > n_1 || val_successes[1] > n_2 {
        return Err(Error::InvalidCounts("validation successes exceed arm size".into()));
    }
    if n_1 + n_2 == 0 {
        return Err(Error::EmptyDataset);
    }
    let term = |p: f64, s: u64, n: u64| s as f64 * p.ln() + (n - s) as f64 * (-p).ln_1p();
    Ok(-(term(p_1, val_successes[0], n_1) + term(p_2, val_successes[1], n_2)) / (n_1 + n_2) as f64)
}

/// Early stopping's decision on a balanced split; ties reject.
pub fn accept_tree1(split: &BalancedSplit, counts: &TwoArmCounts, eta: f64) -> Result<bool> {
    check_eta(eta)?;
    Ok(tree1_improves(&balanced_halves(counts, split)?, eta, CLIP_EPSILON))
}

/// The three events of the acceptance equivalence, evaluated independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceIndicators {
    /// `Tree_1` lowers the validation loss.
    pub accepted: bool,
    /// `sign(Delta_tr) = sign(Delta_val)`, both nonzero.
    pub signs_agree: bool,
    /// `Delta_tr` in `(0, 2 Delta)`, or `(2 Delta, 0)` when `Delta < 0`.
    pub in_interval: bool,
}

impl EquivalenceIndicators {
    pub fn consistent(&self) -> bool {
        self.accepted == self.signs_agree && self.signs_agree == self.in_interval
    }
}

/// Sign and interval tests use exact integer arithmetic; the acceptance
/// test uses the floating-point losses.
pub fn check_equivalence(split: &BalancedSplit, counts: &TwoArmCounts, eta: f64) -> Result<EquivalenceIndicators> {
    let accepted = accept_tree1(split, counts, eta)?;
    let (n1, n2) = counts.half_sizes();
    let (n1, n2) = (n1 as i128, n2 as i128);
    let (s1, s2) = (counts.successes_1 as i128, counts.successes_2 as i128);
    let (k1, k2) = (split.train_successes_1 as i128, split.train_successes_2 as i128);
    // everything scaled by n1 * n2
    let tr = k1 * n2 - k2 * n1;
    let val = (s1 - k1) * n2 - (s2 - k2) * n1;
    let twice_delta = s1 * n2 - s2 * n1;
    let signs_agree = tr != 0 && val != 0 && tr.signum() == val.signum();
    let in_interval = match twice_delta.cmp(&0) {
        Ordering::Greater => 0 < tr && tr < twice_delta,
        Ordering::Less => twice_delta < tr && tr < 0,
        Ordering::Equal => false,
    };
    Ok(EquivalenceIndicators { accepted, signs_agree, in_interval })
}

/// `dL/d delta` at `delta = 0`, where arm 1 moves by `delta` and arm 2 by
/// `-(n_1/n_2) delta` so the weighted mean prediction stays at `r_tr`.
pub fn loss_derivative_at_zero(stats: &SplitStats, n_1: u64, n_2: u64) -> Result<f64> {
    let r = stats.rbar_tr;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Degenerate(format!("training mean {r} leaves no room to move")));
    }
    if n_1 == 0 || n_2 == 0 {
        return Err(Error::param("n", "arm sizes must be positive"));
    }
    let n1 = n_1 as f64;
    Ok(n1 / ((n1 + n_2 as f64) * r * (1.0 - r)) * (stats.rbar_val_2 - stats.rbar_val_1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(k1: u64, k2: u64) -> BalancedSplit {
        BalancedSplit { train_successes_1: k1, train_successes_2: k2 }
    }

    #[test]
    fn two_step_examples() {
        // train halves of 10 per arm: arm 1 has 7 ones, arm 2 has 3 -> r_tr = 0.5, r_tr1 = 0.7
        let c = TwoArmCounts::new(10, 20, 6, 20).unwrap();
        let m = build_two_step(&split(7, 3), &c, 0.1).unwrap();
        assert!((m.tree0_prediction - 0.5).abs() < 1e-15);
        assert!((m.p_1 - 0.52).abs() < 1e-15);
        assert!((m.p_2 - 0.48).abs() < 1e-15);

        let full = build_two_step(&split(7, 3), &c, 1.0).unwrap();
        assert_eq!(full.p_1, 0.7);
        assert_eq!(full.p_2, 0.3);

        let sym = build_two_step(&split(5, 5), &c, 0.1).unwrap();
        assert_eq!((sym.p_1, sym.p_2), (0.5, 0.5));

        assert!(build_two_step(&split(7, 3), &c, 0.0).is_err());
        assert!(build_two_step(&split(11, 3), &c, 0.1).is_err());
    }

    #[test]
    fn weighted_mean_is_preserved() {
        let c = TwoArmCounts::new(5, 6, 3, 10).unwrap();
        for s in c.splits().unwrap() {
            let m = build_two_step(&s, &c, 0.3).unwrap();
            let w = (3.0 * m.p_1 + 5.0 * m.p_2) / 8.0;
            assert!((w - m.tree0_prediction).abs() < 1e-15);
        }
    }

    #[test]
    fn log_loss_examples() {
        let l = two_arm_log_loss(0.5, 0.5, [3, 1], 4, 6).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-15);
        let l = two_arm_log_loss(0.6, 0.5, [1, 0], 1, 1).unwrap();
        assert!((l + 0.5 * (0.6f64.ln() + 0.5f64.ln())).abs() < 1e-15);
        assert!(two_arm_log_loss(0.0, 0.5, [0, 0], 1, 1).is_err());
        assert!(two_arm_log_loss(0.5, 1.0, [0, 0], 1, 1).is_err());
        assert!(two_arm_log_loss(0.5, 0.5, [2, 0], 1, 1).is_err());
    }

    #[test]
    fn acceptance_matches_direct_loss_comparison() {
        let c = TwoArmCounts::new(9, 12, 4, 12).unwrap();
        for s in c.splits().unwrap() {
            let m = build_two_step(&s, &c, 0.2).unwrap();
            let val = [c.successes_1 - s.train_successes_1, c.successes_2 - s.train_successes_2];
            let l0 = two_arm_log_loss(m.tree0_prediction, m.tree0_prediction, val, 6, 6).unwrap();
            let l1 = two_arm_log_loss(m.p_1, m.p_2, val, 6, 6).unwrap();
            if (l1 - l0).abs() > 1e-12 {
                assert_eq!(accept_tree1(&s, &c, 0.2).unwrap(), l1 < l0, "{s:?}");
            }
        }
    }

    #[test]
    fn acceptance_sign_cases() {
        // arm 1: 6/8, arm 2: 2/8
        let c = TwoArmCounts::new(6, 8, 2, 8).unwrap();
        assert!(accept_tree1(&split(3, 1), &c, 0.01).unwrap()); // both differences positive
        assert!(!accept_tree1(&split(4, 0), &c, 0.01).unwrap()); // delta_tr = 1 = 2 Delta, delta_val = 0
        assert!(!accept_tree1(&split(2, 2), &c, 0.01).unwrap()); // delta_tr = 0
        let c = TwoArmCounts::new(4, 8, 4, 8).unwrap();
        assert!(!accept_tree1(&split(3, 1), &c, 0.01).unwrap()); // delta_val < 0
    }

    #[test]
    fn equivalence_boundary_and_center() {
        let c = TwoArmCounts::new(6, 8, 2, 8).unwrap();
        let center = check_equivalence(&split(3, 1), &c, 0.01).unwrap();
        assert_eq!(center, EquivalenceIndicators { accepted: true, signs_agree: true, in_interval: true });
        let edge = check_equivalence(&split(4, 0), &c, 0.01).unwrap();
        assert_eq!(edge, EquivalenceIndicators { accepted: false, signs_agree: false, in_interval: false });
        let mirrored = check_equivalence(&split(1, 3), &c.swapped(), 0.01).unwrap();
        assert_eq!(mirrored, center);
    }

    #[test]
    fn equivalence_small_enumeration() {
        let c = TwoArmCounts::new(3, 4, 1, 4).unwrap();
        let mut accepted = 0;
        for s in c.splits().unwrap() {
            let ind = check_equivalence(&s, &c, 0.01).unwrap();
            assert!(ind.consistent(), "{s:?} {ind:?}");
            accepted += ind.accepted as u32;
        }
        assert_eq!(accepted, 2);
    }

    #[test]
    fn derivative_examples() {
        let st = SplitStats {
            delta: 0.1,
            delta_tr: 0.0,
            delta_val: 0.2,
            rbar_tr: 0.5,
            rbar_tr_1: 0.5,
            rbar_tr_2: 0.5,
            rbar_val_1: 0.6,
            rbar_val_2: 0.4,
        };
        assert!((loss_derivative_at_zero(&st, 5, 5).unwrap() + 0.4).abs() < 1e-15);
        let flat = SplitStats { rbar_val_2: 0.6, ..st };
        assert_eq!(loss_derivative_at_zero(&flat, 5, 5).unwrap(), 0.0);
        let degenerate = SplitStats { rbar_tr: 1.0, ..st };
        assert!(loss_derivative_at_zero(&degenerate, 5, 5).is_err());
    }
}
