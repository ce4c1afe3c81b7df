//! End-to-end runs of every experiment kind on small chains.

use vqoc_core::{AnsatzKind, ChainSetup, Method, NoiseConfig, OptimizerSettings};
use vqoc_experiments::runners::common::optimize_random;
use vqoc_experiments::seed::replication_seed;
use vqoc_experiments::{run, ExperimentConfig, ResultRecord};

fn config(text: &str) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(text).unwrap()
}

fn csv_payloads(r: &ResultRecord) -> Vec<(String, Vec<u8>)> {
    r.tables
        .iter()
        .map(|t| (t.name.clone(), t.to_csv().unwrap()))
        .collect()
}

const MAX_FIDELITY: &str = r#"
experiment = "max-fidelity"
seed = 5
replications = 1
ansatz = ["parabolic-fixed", "free-field"]
[chain]
qubits = 3
trotter_steps = 3
time = 2.0
[optimizer]
budget = 200
[metrics]
pairs = 200
bins = 20
"#;

#[test]
fn single_replication_gives_one_pair_per_ansatz() {
    let r = run(&config(MAX_FIDELITY)).unwrap();
    let pairs = r.table("fidelity_pairs").unwrap();
    assert_eq!(pairs.len(), 2);
    for row in 0..2 {
        let (f0, f1) = (
            pairs.number(row, "f_random").unwrap(),
            pairs.number(row, "f_learned").unwrap(),
        );
        assert!(f1 >= f0);
        assert!(pairs.number(row, "evaluations").unwrap() <= 200.0);
    }
    assert!(r.value("kl.free-field").unwrap() >= 0.0);
    assert_eq!(r.table("cdf").unwrap().len(), 4);
}

#[test]
fn zero_budget_leaves_policies_unchanged() {
    let mut cfg = config(MAX_FIDELITY);
    cfg.optimizer.budget = 0;
    cfg.replications = 3;
    let r = run(&cfg).unwrap();
    let pairs = r.table("fidelity_pairs").unwrap();
    for row in 0..pairs.len() {
        assert_eq!(pairs.number(row, "f_random"), pairs.number(row, "f_learned"));
        assert_eq!(pairs.number(row, "evaluations"), Some(0.0));
    }
    assert_eq!(
        r.value("w1.free-field.gradient-descent"),
        r.value("w1_random.free-field.gradient-descent")
    );
}

#[test]
fn one_by_one_grid_gives_one_cell() {
    let cfg = config(
        r#"
experiment = "optimality-grid"
replications = 20
[chain]
qubits = 3
time = 2.0
[optimizer]
methods = ["nelder-mead"]
[metrics]
pairs = 200
bins = 20
[sweep]
trotter_steps = [3]
budgets = [50]
"#,
    );
    let r = run(&cfg).unwrap();
    assert_eq!(r.table("w1").unwrap().len(), 1);
    assert_eq!(r.table("trotter_kl").unwrap().len(), 1);
    assert_eq!(r.table("guide").unwrap().number(0, "n_lea"), Some(8.0));
    let w1 = r.value("w1.free-field.nelder-mead.Nt3.B50").unwrap();
    assert!((0.0..=1.0).contains(&w1));
}

#[test]
fn noiseless_exact_traces_match_the_pure_cost() {
    let cfg = config(
        r#"
experiment = "noisy"
seed = 9
replications = 1
[chain]
qubits = 3
trotter_steps = 3
time = 2.0
[optimizer]
methods = ["spsa"]
budget = 60
[noise]
p_spam = 0.0
p_gate = 0.0
shots = "exact"
"#,
    );
    let r = run(&cfg).unwrap();
    let setup = ChainSetup::new(3, 3, 2.0).unwrap();
    let seed = replication_seed(9, 0);
    let settings = OptimizerSettings::default();
    let pure = optimize_random(
        AnsatzKind::FreeField,
        setup,
        Method::Spsa,
        60,
        seed,
        &settings,
        None,
    )
    .unwrap();
    let noisy = optimize_random(
        AnsatzKind::FreeField,
        setup,
        Method::Spsa,
        60,
        seed,
        &settings,
        Some(NoiseConfig::noiseless()),
    )
    .unwrap();
    let (hp, hn) = (
        &pure.trace.as_ref().unwrap().history,
        &noisy.trace.as_ref().unwrap().history,
    );
    assert_eq!(hp, hn);

    let traces = r.table("traces").unwrap();
    assert_eq!(traces.len(), hp.len());
    for (row, &(_, cost)) in hp.iter().enumerate() {
        assert_eq!(traces.number(row, "mean_loss").unwrap().to_bits(), cost.to_bits());
    }
}

#[test]
fn shot_noise_loss_sweep_and_time_sweep() {
    let cfg = config(
        r#"
experiment = "noisy"
replications = 2
[chain]
qubits = 3
trotter_steps = 3
time = 2.0
[optimizer]
methods = ["nelder-mead"]
budget = 100
[noise]
p_spam = 0.02
shots = 1024
tail = 5
probabilities = [0.0, 0.02]
[sweep]
times = [1.0, 2.0]
"#,
    );
    let r = run(&cfg).unwrap();
    let sweep = r.table("loss_vs_p").unwrap();
    assert_eq!(sweep.len(), 2);
    // the configured probability reuses the main batch
    assert_eq!(
        r.value("final_loss.free-field.nelder-mead.p0.02"),
        r.value("final_loss.free-field.nelder-mead")
    );
    let fvt = r.table("fidelity_vs_time").unwrap();
    assert_eq!(fvt.len(), 2);
    for row in 0..2 {
        let f = fvt.number(row, "mean_fidelity_noisy").unwrap();
        assert!((0.0..=1.0).contains(&f));
    }
}

#[test]
fn gradvar_trotter_expressibility_and_time_optimal_run() {
    let g = run(&config(
        r#"
experiment = "gradvar"
ansatz = ["parabolic-fixed"]
[chain]
qubits = 3
h = 0.5
[metrics]
gradient_samples = 50
[sweep]
qubits = [3, 4]
times = [0.5, 1.0]
"#,
    ))
    .unwrap();
    assert!(g.value("slope.qubits.parabolic-fixed").unwrap().is_finite());
    assert!(g.value("slope.time.parabolic-fixed").unwrap().is_finite());

    let t = run(&config(
        r#"
experiment = "trotter-error"
replications = 2
[chain]
qubits = 3
trotter_steps = 4
time = 1.0
[optimizer]
budget = 0
[sweep]
times = [0.5]
trotter_steps = [4, 8]
"#,
    ))
    .unwrap();
    let xi4 = t.value("mean_xi.free-field.Nt4").unwrap();
    let xi8 = t.value("mean_xi.free-field.Nt8").unwrap();
    assert!(xi8 < xi4);
    assert_eq!(t.table("runs").unwrap().len(), 6);

    let e = run(&config(
        r#"
experiment = "expressibility"
[chain]
qubits = 3
time = 2.0
[metrics]
pairs = 300
bins = 10
[sweep]
trotter_steps = [2, 3]
"#,
    ))
    .unwrap();
    let hist = e.table("histogram").unwrap();
    assert_eq!(hist.len(), 20);
    let total: f64 = (0..10).map(|row| hist.number(row, "haar").unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);

    let o = run(&config(
        r#"
experiment = "time-optimal"
replications = 2
[chain]
qubits = 3
trotter_steps = 3
[optimizer]
budget = 300
[sweep]
qubits = [3]
h = [1.0]
[sweep.bisection]
lo = 0.1
hi = 3.0
tolerance = 0.5
"#,
    ))
    .unwrap();
    assert_eq!(o.table("scan").unwrap().len(), 1);
    let tmin = o.value("minimum_time").unwrap();
    let lower = o.value("minimum_time_lower").unwrap();
    assert!(tmin.is_nan() || (tmin - lower <= 0.5 && lower < tmin));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let mut a = config(MAX_FIDELITY);
    a.replications = 4;
    a.threads = Some(1);
    let mut b = a.clone();
    b.threads = Some(3);
    let (ra, rb) = (run(&a).unwrap(), run(&b).unwrap());
    assert_eq!(csv_payloads(&ra), csv_payloads(&rb));
    assert_eq!(csv_payloads(&ra), csv_payloads(&run(&a).unwrap()));
}

#[test]
fn metadata_records_provenance() {
    let cfg = config(MAX_FIDELITY);
    let r = run(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = r.write(dir.path()).unwrap();
    assert_eq!(files.len(), r.tables.len() + 1);
    let meta: toml::Table = std::fs::read_to_string(dir.path().join("metadata.toml"))
        .unwrap()
        .parse()
        .unwrap();
    let run_info = meta["run"].as_table().unwrap();
    assert_eq!(run_info["config_hash"].as_str().unwrap(), cfg.hash());
    assert_eq!(run_info["seed"].as_integer(), Some(5));
    assert_eq!(run_info["bins"].as_integer(), Some(20));
    assert_eq!(meta["config"]["experiment"].as_str(), Some("max-fidelity"));
    // the embedded configuration reproduces the hash
    let embedded = ExperimentConfig::from_toml_str(&toml::to_string(&meta["config"]).unwrap()).unwrap();
    assert_eq!(embedded.hash(), cfg.hash());
}

#[test]
fn invalid_configs_fail_before_running() {
    let mut cfg = config(MAX_FIDELITY);
    cfg.chain.qubits = 13;
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 2);
}
