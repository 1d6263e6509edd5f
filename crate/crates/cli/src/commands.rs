use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use esbandit::gbt::{split_train_val, train_fixed_rounds};
use esbandit::runner::{evaluate_truncations, run_burn_in, run_experiment, stopping_iterations};
use esbandit::two_arm::{
    allocation_prob_exhaustive, allocation_prob_montecarlo, one_sided_pvalue, sigma_delta, simulate_reward_curves,
    ts_allocation_prob, RewardSimConfig,
};
use esbandit::{derive_seed, rng_from_seed, Environment, Preset, TwoArmCounts};

use crate::config::Config;
use crate::experiment::{environment_from, experiment_from, experiment_keys, gbt_from, manifest, write_environment, write_gbt};
use crate::format::fmt_num;
use crate::{AllocArgs, AllocMethod, AnalyzeArgs, RewardArgs, SimulateArgs};

/// Largest per-arm total `auto` enumerates exhaustively.
pub const AUTO_EXHAUSTIVE_MAX: u64 = 60;

pub const ALLOC_HEADER: &str = "N1,N2,s1,s2,p_earlystop_arm2,p_ts_arm2,one_sided_pvalue";
pub const REWARD_HEADER: &str = "round,thompson,early_stopping";
pub const ITERATIONS_HEADER: &str = "iteration,stop_count,mse,regret";

/// Manifest path for an output file: `<out>.manifest`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest");
    PathBuf::from(s)
}

fn emit(out: Option<&Path>, csv: &str, command: &str, keys: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
            let m = manifest_path(path);
            fs::write(&m, manifest(command, &[path], keys)).with_context(|| format!("writing {}", m.display()))?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn counts_for(total: u64, counts: &[u64], means: &[f64], default_mean: f64, arm: u8) -> anyhow::Result<Vec<u64>> {
    if !counts.is_empty() {
        return Ok(counts.to_vec());
    }
    let means = if means.is_empty() { vec![default_mean] } else { means.to_vec() };
    means
        .iter()
        .map(|&m| {
            if !(0.0..=1.0).contains(&m) {
                bail!("mean{arm} = {m} lies outside [0, 1]");
            }
            Ok((m * total as f64).round() as u64)
        })
        .collect()
}

pub fn two_arm_alloc(a: &AllocArgs) -> anyhow::Result<()> {
    let s1 = counts_for(a.n1, &a.s1, &a.mean1, 0.6, 1)?;
    let s2 = counts_for(a.n2, &a.s2, &a.mean2, 0.5, 2)?;
    let exhaustive = match a.method {
        AllocMethod::Auto => a.n1 <= AUTO_EXHAUSTIVE_MAX && a.n2 <= AUTO_EXHAUSTIVE_MAX,
        AllocMethod::Exhaustive => true,
        AllocMethod::Montecarlo => false,
    };
    let mut csv = format!("{ALLOC_HEADER}\n");
    let mut row = 0u64;
    for &x1 in &s1 {
        for &x2 in &s2 {
            let counts = TwoArmCounts::new(x1, a.n1, x2, a.n2)?;
            let es = if exhaustive {
                allocation_prob_exhaustive(&counts, a.eta)?
            } else {
                allocation_prob_montecarlo(&counts, a.eta, a.sims, derive_seed(a.seed, 2 * row))?
            };
            let ts = ts_allocation_prob(&counts, a.prior_alpha, a.prior_beta, a.sims, derive_seed(a.seed, 2 * row + 1))?;
            let sigma = sigma_delta(counts.mean_1(), counts.mean_2(), a.n1, a.n2)?;
            let p = if sigma > 0.0 { one_sided_pvalue(counts.delta(), sigma)? } else { f64::NAN };
            let _ = writeln!(
                csv,
                "{},{},{x1},{x2},{},{},{}",
                a.n1,
                a.n2,
                fmt_num(es.allocation.arm_2),
                fmt_num(ts.arm_2),
                fmt_num(p)
            );
            row += 1;
        }
    }
    let mut keys = String::new();
    let _ = writeln!(keys, "n1 = {}\nn2 = {}\ns1 = {}\ns2 = {}", a.n1, a.n2, join(&s1), join(&s2));
    let _ = writeln!(keys, "eta = {}\nsims = {}\nseed = {}", fmt_num(a.eta), a.sims, a.seed);
    let _ = writeln!(keys, "method = {}", if exhaustive { "exhaustive" } else { "montecarlo" });
    let _ = writeln!(keys, "prior_alpha = {}\nprior_beta = {}", fmt_num(a.prior_alpha), fmt_num(a.prior_beta));
    emit(a.out.as_deref(), &csv, "two-arm-alloc", &keys)
}

pub fn two_arm_reward(a: &RewardArgs) -> anyhow::Result<()> {
    let cfg = RewardSimConfig {
        means: [a.mean1, a.mean2],
        horizon: a.horizon,
        replications: a.replications,
        seed: a.seed,
        eta: a.eta,
        prior_alpha: a.prior_alpha,
        prior_beta: a.prior_beta,
    };
    let curves = simulate_reward_curves(&cfg)?;
    let mut csv = format!("{REWARD_HEADER}\n");
    for (i, (ts, es)) in curves.thompson.iter().zip(&curves.early_stopping).enumerate() {
        let _ = writeln!(csv, "{},{},{}", i + 1, fmt_num(*ts), fmt_num(*es));
    }
    let mut keys = String::new();
    let _ = writeln!(keys, "mean1 = {}\nmean2 = {}", fmt_num(a.mean1), fmt_num(a.mean2));
    let _ = writeln!(keys, "horizon = {}\nreplications = {}\nseed = {}", a.horizon, a.replications, a.seed);
    let _ = writeln!(keys, "eta = {}", fmt_num(a.eta));
    let _ = writeln!(keys, "prior_alpha = {}\nprior_beta = {}", fmt_num(a.prior_alpha), fmt_num(a.prior_beta));
    emit(a.out.as_deref(), &csv, "two-arm-reward", &keys)
}

fn read_config(path: &Path) -> anyhow::Result<Config> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Config::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn simulate(a: &SimulateArgs) -> anyhow::Result<()> {
    let cfg = read_config(&a.config)?;
    let (preset, mut x) = experiment_from(&cfg)?;
    cfg.finish().with_context(|| format!("in {}", a.config.display()))?;
    if let Some(seed) = a.seed {
        x.seed = seed;
        x.environment.seed = seed;
    }
    if let Some(r) = a.replications {
        x.replications = r;
    }
    x.validate()?;
    let log = run_experiment(&x)?;
    emit(a.out.as_deref(), &log.to_csv(fmt_num), "simulate", &experiment_keys(preset, &x))
}

pub fn analyze_iterations(a: &AnalyzeArgs) -> anyhow::Result<()> {
    let cfg = read_config(&a.config)?;
    let preset: Option<Preset> = cfg.required("preset")?;
    let seed = match a.seed {
        Some(s) => {
            cfg.optional::<u64>("seed")?;
            s
        }
        None => cfg.or("seed", 0u64)?,
    };
    let burn_in: usize = cfg.or("burn_in", 1000)?;
    let runs: usize = cfg.or("runs", 100)?;
    let n_contexts: usize = cfg.or("contexts", 1000)?;
    let epoch: usize = cfg.or("epoch", 0)?;
    let env_seed: u64 = cfg.or("environment_seed", derive_seed(seed, 1))?;
    let env_cfg = environment_from(&cfg, preset.unwrap_or(Preset::Simple), env_seed)?;
    let gbt = gbt_from(&cfg)?;
    cfg.finish().with_context(|| format!("in {}", a.config.display()))?;
    let preset = preset.expect("checked by finish");
    if burn_in == 0 || runs == 0 || n_contexts == 0 {
        bail!("burn_in, runs and contexts must all be at least 1");
    }
    gbt.validate()?;

    let env = Environment::build(&env_cfg)?;
    let buffer = run_burn_in(&env, burn_in, None, &mut rng_from_seed(derive_seed(seed, 0)));
    let stops = stopping_iterations(&buffer, &env, &gbt, runs, derive_seed(seed, 2))?;
    let data = buffer.to_dataset(&env)?;
    let (train, _) = split_train_val(&data, gbt.validation_fraction, derive_seed(seed, 3))?;
    let full = train_fixed_rounds(&train, &gbt, gbt.max_rounds)?;
    let mut rng = rng_from_seed(derive_seed(seed, 4));
    let contexts: Vec<usize> = (0..n_contexts).map(|_| env.pool.sample_index(&mut rng)).collect();
    let curve = evaluate_truncations(&full, &env, epoch, &contexts, gbt.clip_epsilon)?;

    let mut histogram = vec![0usize; curve.len().max(stops.iter().max().map_or(0, |m| m + 1))];
    for &s in &stops {
        histogram[s] += 1;
    }
    let mut csv = format!("{ITERATIONS_HEADER}\n");
    for (i, count) in histogram.iter().enumerate() {
        match curve.get(i) {
            Some(p) => writeln!(csv, "{i},{count},{},{}", fmt_num(p.mse), fmt_num(p.regret)),
            None => writeln!(csv, "{i},{count},,"),
        }
        .expect("writing to a String");
    }

    let mut keys = String::new();
    let _ = writeln!(keys, "preset = {preset}\nseed = {seed}\nburn_in = {burn_in}\nruns = {runs}");
    let _ = writeln!(keys, "contexts = {n_contexts}\nepoch = {epoch}\nenvironment_seed = {env_seed}");
    write_environment(&mut keys, &env_cfg);
    write_gbt(&mut keys, &gbt);
    emit(a.out.as_deref(), &csv, "analyze-iterations", &keys)
}
