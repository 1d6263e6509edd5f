use rand_distr::{Binomial, Distribution};

use super::allocation::hypergeometric;
use crate::error::{Error, Result};
use crate::rng_from_seed;
use crate::stats::normal_cdf;

/// True arm means and sample sizes with the standard deviation of the
/// full-sample mean difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisParams {
    pub mu_1: f64,
    pub mu_2: f64,
    pub total_1: u64,
    pub total_2: u64,
    pub sigma_delta: f64,
}

impl HypothesisParams {
    pub fn new(mu_1: f64, mu_2: f64, total_1: u64, total_2: u64) -> Result<Self> {
        let sigma_delta = sigma_delta(mu_1, mu_2, total_1, total_2)?;
        Ok(Self { mu_1, mu_2, total_1, total_2, sigma_delta })
    }
}

/// `sqrt(mu_1 (1 - mu_1) / N_1 + mu_2 (1 - mu_2) / N_2)`.
pub fn sigma_delta(mu_1: f64, mu_2: f64, total_1: u64, total_2: u64) -> Result<f64> {
    for mu in [mu_1, mu_2] {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::param("mu", format!("mean {mu} outside [0, 1]")));
        }
    }
    if total_1 == 0 || total_2 == 0 {
        return Err(Error::param("total", "sample sizes must be positive"));
    }
    Ok((mu_1 * (1.0 - mu_1) / total_1 as f64 + mu_2 * (1.0 - mu_2) / total_2 as f64).sqrt())
}

/// Draws `(Delta_tr - Delta) / sigma_Delta`: full Bernoulli samples per arm,
/// then a uniformly random balanced split. `Delta` is the full-sample
/// difference.
pub fn sample_standardized_delta_tr(params: &HypothesisParams, n_sims: u64, seed: u64) -> Result<Vec<f64>> {
    let HypothesisParams { mu_1, mu_2, total_1, total_2, .. } = *params;
    let sigma = sigma_delta(mu_1, mu_2, total_1, total_2)?;
    if total_1 % 2 != 0 || total_2 % 2 != 0 {
        return Err(Error::InvalidCounts(format!("totals {total_1}, {total_2} must be even")));
    }
    if sigma == 0.0 {
        return Err(Error::Degenerate("zero variance: every standardized value would be 0/0".into()));
    }
    let b1 = Binomial::new(total_1, mu_1).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let b2 = Binomial::new(total_2, mu_2).map_err(|e| Error::InvalidDistribution(e.to_string()))?;
    let (n1, n2) = (total_1 / 2, total_2 / 2);
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(n_sims as usize);
    for _ in 0..n_sims {
        let s1 = b1.sample(&mut rng);
        let s2 = b2.sample(&mut rng);
        let k1 = hypergeometric(total_1, s1, n1)?.sample(&mut rng);
        let k2 = hypergeometric(total_2, s2, n2)?.sample(&mut rng);
        let delta = s1 as f64 / total_1 as f64 - s2 as f64 / total_2 as f64;
        let delta_tr = k1 as f64 / n1 as f64 - k2 as f64 / n2 as f64;
        out.push((delta_tr - delta) / sigma);
    }
    Ok(out)
}

/// `2 Phi(-|delta| / sigma)`.
pub fn two_sided_pvalue(delta: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(2.0 * normal_cdf(-delta.abs() / sigma))
}

/// `Phi(-delta / sigma)`, the upper-tail p-value of a positive difference.
pub fn one_sided_pvalue(delta: f64, sigma: f64) -> Result<f64> {
    check_sigma(sigma)?;
    Ok(normal_cdf(-delta / sigma))
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::param("sigma", format!("must be positive and finite, got {sigma}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_delta(0.0, 0.0, 10, 10).unwrap(), 0.0);
        let s = sigma_delta(0.6, 0.4, 100, 100).unwrap();
        assert!((s - 0.0048f64.sqrt()).abs() < 1e-15);
        assert!((s - 0.06928).abs() < 1e-5);
        let q = sigma_delta(0.6, 0.4, 400, 400).unwrap();
        assert!((q - s / 2.0).abs() < 1e-15);
        assert!(sigma_delta(0.5, 0.5, 0, 10).is_err());
        assert!(sigma_delta(1.5, 0.5, 10, 10).is_err());
    }

    #[test]
    fn pvalue_examples() {
        assert_eq!(two_sided_pvalue(0.0, 1.0).unwrap(), 1.0);
        assert!((two_sided_pvalue(1.959964, 1.0).unwrap() - 0.05).abs() < 1e-6);
        assert_eq!(two_sided_pvalue(0.3, 0.2).unwrap(), two_sided_pvalue(-0.3, 0.2).unwrap());
        assert!(two_sided_pvalue(0.1, 0.0).is_err());
        assert!((one_sided_pvalue(1.959964, 1.0).unwrap() - 0.025).abs() < 1e-6);
    }

    #[test]
    fn degenerate_means_are_guarded() {
        let p = HypothesisParams::new(1.0, 1.0, 10, 10).unwrap();
        assert!(sample_standardized_delta_tr(&p, 5, 0).is_err());
        let p = HypothesisParams::new(0.5, 0.5, 11, 10).unwrap();
        assert!(sample_standardized_delta_tr(&p, 5, 0).is_err());
    }
}
