//! Trotter error of smooth control policies against the total time and the
//! number of Trotter steps.

use std::collections::BTreeMap;

use vqoc_core::metrics::{trotter_error_with, w1_optimality};
use vqoc_core::{smooth_policy, AnsatzKind};

use super::common::{mean, optimize_policy, std_dev, Context};
use crate::config::speed_limit_time;
use crate::error::Result;
use crate::record::Table;
use crate::row;
use crate::seed::replication_seed;

/// Tables:
/// - `vs_time`, `vs_steps`: ansatz, method, qubits, time, trotter_steps, mean_xi, std_xi,
///   mean_infidelity, w1
/// - `runs`: ansatz, sweep, qubits, time, trotter_steps, replication, seed, xi, infidelity
///
/// Each replication draws a smooth policy; with a positive budget it is
/// first optimized by the first configured method. `vs_steps` uses the
/// chain time, or the `h = 0.5` speed-limit time when none is set.
pub fn run(ctx: &Context) -> Result<(Vec<Table>, BTreeMap<String, f64>)> {
    let cfg = ctx.cfg;
    let sw = &cfg.sweep;
    let n = cfg.chain.qubits;
    let method = cfg.optimizer.methods()[0];
    let step_time = cfg
        .chain
        .total_time(n)
        .unwrap_or_else(|| speed_limit_time(0.5, n, cfg.chain.coupling));

    // (kind, by_time, trotter_steps, time)
    let mut points: Vec<(AnsatzKind, bool, usize, f64)> = Vec::new();
    for kind in cfg.kinds() {
        for &t in &sw.times {
            points.push((kind, true, cfg.chain.trotter_steps, t));
        }
        for &nt in &sw.trotter_steps {
            points.push((kind, false, nt, step_time));
        }
    }
    let mut jobs = Vec::new();
    for (p, _) in points.iter().enumerate() {
        for i in 0..cfg.replications {
            jobs.push((p, i));
        }
    }
    let results = ctx.par_map(&jobs, |&(p, i)| {
        let (kind, _, nt, t) = points[p];
        let seed = replication_seed(cfg.seed, i as u64);
        let policy = smooth_policy(kind, ctx.setup(n, nt, t)?, seed)?;
        let out = optimize_policy(
            policy.clone(),
            method,
            cfg.optimizer.budget,
            seed,
            &ctx.settings,
            None,
        )?;
        let tuned = policy.with_params(out.params.clone())?;
        let xi = trotter_error_with(&tuned, cfg.metrics.substeps, cfg.metrics.interpolation())?;
        Ok((seed, xi, out.fidelity))
    })?;

    let columns = [
        "ansatz",
        "method",
        "qubits",
        "time",
        "trotter_steps",
        "mean_xi",
        "std_xi",
        "mean_infidelity",
        "w1",
    ];
    let mut vs_time = Table::new("vs_time", &columns);
    let mut vs_steps = Table::new("vs_steps", &columns);
    let mut runs = Table::new(
        "runs",
        &[
            "ansatz",
            "sweep",
            "qubits",
            "time",
            "trotter_steps",
            "replication",
            "seed",
            "xi",
            "infidelity",
        ],
    );
    let mut values = BTreeMap::new();
    for (p, chunk) in results.chunks(cfg.replications).enumerate() {
        let (kind, by_time, nt, t) = points[p];
        let a = kind.name();
        let sweep = if by_time { "time" } else { "steps" };
        for (i, &(seed, xi, f)) in chunk.iter().enumerate() {
            runs.push(row![a, sweep, n, t, nt, i, seed, xi, 1.0 - f]);
        }
        let xis: Vec<f64> = chunk.iter().map(|r| r.1).collect();
        let fid: Vec<f64> = chunk.iter().map(|r| r.2).collect();
        let inf: Vec<f64> = fid.iter().map(|f| 1.0 - f).collect();
        let w1 = w1_optimality(&fid, cfg.metrics.epsilon)?;
        let r = row![
            a,
            method.name(),
            n,
            t,
            nt,
            mean(&xis),
            std_dev(&xis),
            mean(&inf),
            w1
        ];
        if by_time {
            vs_time.push(r);
            values.insert(format!("mean_xi.{a}.T{t}"), mean(&xis));
        } else {
            vs_steps.push(r);
            values.insert(format!("mean_xi.{a}.Nt{nt}"), mean(&xis));
        }
    }
    Ok((vec![vs_time, vs_steps, runs], values))
}
