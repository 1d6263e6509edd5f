//! Shared fixtures for the benchmarks.

use esbandit::runner::{run_burn_in, HistoryBuffer};
use esbandit::{rng_from_seed, Dataset, Environment, EnvironmentConfig, Preset};

/// A simple-preset environment and a burn-in buffer of `rows` records.
pub fn burn_in_fixture(rows: usize, seed: u64) -> (Environment, HistoryBuffer) {
    let env = Environment::build(&EnvironmentConfig::preset(Preset::Simple, seed)).expect("preset environment");
    let buffer = run_burn_in(&env, rows, None, &mut rng_from_seed(seed));
    (env, buffer)
}

pub fn burn_in_dataset(rows: usize, seed: u64) -> Dataset {
    let (env, buffer) = burn_in_fixture(rows, seed);
    buffer.to_dataset(&env).expect("dataset")
}
