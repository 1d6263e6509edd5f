use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use esbandit::two_arm::allocation_prob_exhaustive;
use esbandit::TwoArmCounts;

fn esbandit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esbandit")).args(args).output().expect("spawn esbandit")
}

fn ok(args: &[&str]) -> String {
    let out = esbandit(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

const SMALL: &str = "pool_size = 100\nlabel_rows = 1000\ntruth_rounds = 30\nburn_in = 300\n\
                     epochs = 5\nepoch_size = 50\ngbt_max_rounds = 40\nreplications = 2\n";

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn alloc_reference_row() {
    let csv = ok(&["two-arm-alloc", "--mean1", "0.6", "--mean2", "0.5", "--sims", "100000", "--seed", "3"]);
    assert_eq!(csv.lines().next().unwrap(), "N1,N2,s1,s2,p_earlystop_arm2,p_ts_arm2,one_sided_pvalue");
    let r = &rows(&csv)[0];
    assert_eq!(&r[..4], ["100", "100", "60", "50"]);
    let (es, ts, p) = (num(&r[4]), num(&r[5]), num(&r[6]));
    assert!((es - ts).abs() < 0.05, "{es} vs {ts}");
    // Monte-Carlo estimate against exhaustive enumeration
    let exact = allocation_prob_exhaustive(&TwoArmCounts::new(60, 100, 50, 100).unwrap(), 0.01).unwrap();
    assert!((es - exact.allocation.arm_2).abs() < 4.0 * (0.1f64 * 0.9 / 1e5).sqrt());
    assert!((p - 0.0766).abs() < 1e-3);
}

#[test]
fn alloc_symmetric_counts_split_evenly() {
    let csv = ok(&["two-arm-alloc", "--n1", "40", "--n2", "40", "--s1", "10,20", "--s2", "10,20", "--sims", "40000"]);
    for r in rows(&csv).iter().filter(|r| r[2] == r[3]) {
        assert_eq!(num(&r[4]), 0.5);
        assert!((num(&r[5]) - 0.5).abs() < 0.01);
        assert_eq!(num(&r[6]), 0.5);
    }
    assert_eq!(rows(&csv).len(), 4);
}

#[test]
fn alloc_rejects_bad_input() {
    for args in [
        &["two-arm-alloc", "--n1", "5", "--n2", "6"][..],
        &["two-arm-alloc", "--mean1", "1.2"],
        &["two-arm-alloc", "--s1", "3", "--mean1", "0.5"],
        &["two-arm-alloc", "--n1", "10", "--s1", "11"],
        &["two-arm-alloc", "--eta", "0"],
    ] {
        let out = esbandit(args);
        assert!(!out.status.success(), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn reward_curves_with_equal_means() {
    let csv = ok(&["two-arm-reward", "--mean1", "0.5", "--mean2", "0.5", "--horizon", "400", "--replications", "60"]);
    let r = rows(&csv);
    assert_eq!(r.len(), 400);
    assert_eq!(r[0][0], "1");
    let last = r.last().unwrap();
    for v in [num(&last[1]), num(&last[2])] {
        assert!((v - 0.5).abs() < 0.03, "{v}");
    }
}

#[test]
fn reward_curves_with_one_round() {
    let csv = ok(&["two-arm-reward", "--horizon", "1", "--replications", "400", "--seed", "5"]);
    let r = rows(&csv);
    assert_eq!(r.len(), 1);
    for v in [num(&r[0][1]), num(&r[0][2])] {
        // first round is uniform over arms with means 0.6 and 0.4
        assert!((v - 0.5).abs() < 4.0 * (0.25f64 / 400.0).sqrt(), "{v}");
    }
}

#[test]
fn simulate_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", &format!("# drift run\npreset = drift\nestimator = early_stop\npolicy = greedy\nseed = 4\n{SMALL}"));
    let out = dir.path().join("run.csv");
    ok(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "replication,epoch,cum_reward,cum_regret,mean_regret,stop_iteration");
    assert_eq!(rows(&csv).len(), 2 * 5);

    let manifest = fs::read_to_string(dir.path().join("run.csv.manifest")).unwrap();
    assert!(manifest.starts_with("# esbandit "));
    assert!(manifest.contains("window = 4500\n"));
    assert!(manifest.contains("stationary = false\n"));

    // the manifest is itself a config that reproduces the run
    let cfg2 = write(dir.path(), "again.cfg", &manifest);
    let out2 = dir.path().join("again.csv");
    ok(&["simulate", "--config", cfg2.to_str().unwrap(), "--out", out2.to_str().unwrap()]);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&out2).unwrap());
}

#[test]
fn simulate_overrides_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.cfg", &format!("preset = simple\nestimator = fixed:3\npolicy = falcon\n{SMALL}"));
    let c = cfg.to_str().unwrap();
    let base = ok(&["simulate", "--config", c]);
    let three = ok(&["simulate", "--config", c, "--replications", "3"]);
    assert_eq!(rows(&three).len(), 15);
    assert!(three.starts_with(&base));
    assert_ne!(base, ok(&["simulate", "--config", c, "--seed", "9"]));
    assert!(rows(&base).iter().all(|r| r[5] == "3"));
}

#[test]
fn simulate_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown.cfg", format!("preset = simple\nestimator = fixed\npolicy = greedy\nlearning_rate = 0.2\n{SMALL}"), "learning_rate"),
        ("missing.cfg", "preset = simple\n".to_string(), "estimator, policy"),
        ("bad.cfg", "preset = simple\nestimator = sometimes\npolicy = greedy\n".to_string(), "sometimes"),
        ("thompson.cfg", format!("preset = simple\nestimator = fixed\npolicy = thompson\n{SMALL}"), "thompson"),
    ];
    for (name, text, needle) in cases {
        let cfg = write(dir.path(), name, &text);
        let out = esbandit(&["simulate", "--config", cfg.to_str().unwrap()]);
        assert!(!out.status.success(), "{name}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{name}: {err}");
    }
    assert!(!esbandit(&["simulate", "--config", "/nonexistent/x.cfg"]).status.success());
}

fn iteration_curve(csv: &str) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
    let r = rows(csv);
    (
        r.iter().map(|x| x[1].parse().unwrap()).collect(),
        r.iter().map(|x| num(&x[2])).collect(),
        r.iter().map(|x| num(&x[3])).collect(),
    )
}

fn argmax<T: PartialOrd + Copy>(xs: &[T]) -> usize {
    (0..xs.len()).fold(0, |b, i| if xs[i] > xs[b] { i } else { b })
}

#[test]
fn analyze_strong_signal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "strong.cfg", "preset = strong\nseed = 1\nruns = 100\n");
    let csv = ok(&["analyze-iterations", "--config", cfg.to_str().unwrap()]);
    assert_eq!(csv.lines().next().unwrap(), "iteration,stop_count,mse,regret");
    let (counts, mse, regret) = iteration_curve(&csv);
    assert_eq!(counts.iter().sum::<usize>(), 100);
    assert_eq!(mse.len(), 201);
    let best = (0..mse.len()).fold(0, |b, i| if mse[i] < mse[b] { i } else { b });
    // U shape: strictly interior minimum
    assert!(best > 0 && best < mse.len() - 1);
    assert!(mse[0] > mse[best] && *mse.last().unwrap() > mse[best]);
    let mode = argmax(&counts);
    assert!(mode.abs_diff(best) <= 5, "mode {mode}, argmin {best}");
    assert!(regret.iter().all(|&r| r >= 0.0));
}

#[test]
fn analyze_null_signal() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "null.cfg", "preset = null\nruns = 60\n");
    let csv = ok(&["analyze-iterations", "--config", cfg.to_str().unwrap(), "--seed", "2"]);
    let (counts, _, regret) = iteration_curve(&csv);
    assert_eq!(argmax(&counts), 0);
    assert!(counts[0] * 2 > 60, "{}", counts[0]);
    assert!(regret.iter().all(|&r| r == 0.0));
}

#[test]
fn analyze_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.cfg", "seed = 1\nestimator = early_stop\n");
    let out = esbandit(&["analyze-iterations", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("preset"));
}
