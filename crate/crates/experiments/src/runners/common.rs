use rayon::prelude::*;
use vqoc_core::optimize::{optimize, CostEvaluator, Method, OptimizationTrace, OptimizerSettings};
use vqoc_core::{AnsatzKind, ChainSetup, ControlPolicy, NoiseConfig};

use crate::config::ExperimentConfig;
use crate::error::{ExpError, Result};
use crate::seed::{stream_seed, SHOT_STREAM};

/// Worker pool and resolved settings shared by one run.
pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub settings: OptimizerSettings,
    pool: rayon::ThreadPool,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads.unwrap_or(0))
            .build()
            .map_err(|e| ExpError::Precondition(format!("cannot start worker pool: {e}")))?;
        Ok(Self {
            cfg,
            settings: cfg.optimizer.settings(),
            pool,
        })
    }

    /// Maps `f` over `items` on the pool. Output order follows input order,
    /// so results do not depend on scheduling.
    pub fn par_map<T, R, F>(&self, items: &[T], f: F) -> Result<Vec<R>>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> Result<R> + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(&f).collect())
    }

    pub fn setup(&self, qubits: usize, trotter_steps: usize, time: f64) -> Result<ChainSetup> {
        self.cfg.chain.setup(qubits, trotter_steps, time)
    }
}

/// One optimization run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub seed: u64,
    /// Fidelity of the starting parameters.
    pub initial_fidelity: f64,
    /// Fidelity of the best parameters found; channels applied, no shots.
    pub fidelity: f64,
    pub params: Vec<f64>,
    pub trace: Option<OptimizationTrace>,
}

impl RunOutcome {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }

    pub fn evaluations(&self) -> u64 {
        self.trace.as_ref().map_or(0, |t| t.evaluations())
    }
}

/// Optimizes `policy` from its own parameters. A zero budget returns the
/// starting point unchanged.
pub fn optimize_policy(
    policy: ControlPolicy,
    method: Method,
    budget: u64,
    seed: u64,
    settings: &OptimizerSettings,
    noise: Option<NoiseConfig>,
) -> Result<RunOutcome> {
    let x0 = policy.params().to_vec();
    let mut ev = CostEvaluator::new(policy)?;
    if let Some(cfg) = noise {
        ev = ev.with_noise(cfg, stream_seed(seed, SHOT_STREAM))?;
    }
    let initial_fidelity = ev.fidelity(&x0)?;
    if budget == 0 {
        return Ok(RunOutcome {
            seed,
            initial_fidelity,
            fidelity: initial_fidelity,
            params: x0,
            trace: None,
        });
    }
    let trace = optimize(&mut ev, &x0, method, budget, seed, settings)?;
    let fidelity = ev.fidelity(&trace.best_params)?;
    Ok(RunOutcome {
        seed,
        initial_fidelity,
        fidelity,
        params: trace.best_params.clone(),
        trace: Some(trace),
    })
}

/// Random initialization from `seed`, then [`optimize_policy`].
pub fn optimize_random(
    kind: AnsatzKind,
    setup: ChainSetup,
    method: Method,
    budget: u64,
    seed: u64,
    settings: &OptimizerSettings,
    noise: Option<NoiseConfig>,
) -> Result<RunOutcome> {
    let policy = ControlPolicy::random(kind, setup, seed)?;
    optimize_policy(policy, method, budget, seed, settings, noise)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; zero for a single value.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Least-squares line `y = slope·x + intercept`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let (mx, my) = (mean(xs), mean(ys));
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
