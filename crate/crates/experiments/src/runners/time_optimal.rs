//! Time-optimal control: fidelity reached at `T = h(N − 1)/J0` with
//! `N_t = N`, and a bisection for the shortest feasible time.

use std::collections::BTreeMap;

use vqoc_core::metrics::w1_optimality;
use vqoc_core::{AnsatzKind, Method};

use super::common::{mean, optimize_random, std_dev, Context, RunOutcome};
use crate::config::speed_limit_time;
use crate::error::Result;
use crate::record::Table;
use crate::row;
use crate::seed::replication_seed;

/// Tables:
/// - `runs`: ansatz, method, qubits, h, time, replication, seed, infidelity
/// - `scan`: ansatz, method, qubits, h, time, trotter_steps, mean_infidelity, std_infidelity,
///   min_infidelity, success_fraction, w1, log_infidelity_time
/// - `bisection` (when configured): step, time, success_fraction, min_infidelity, feasible, lo, hi
///
/// `log_infidelity_time` is `log10(1 − F_opt)·T` with `F_opt` the mean
/// optimized fidelity.
pub fn run(ctx: &Context) -> Result<(Vec<Table>, BTreeMap<String, f64>)> {
    let cfg = ctx.cfg;
    let sw = &cfg.sweep;
    let mut points = Vec::new();
    for kind in cfg.kinds() {
        for method in cfg.optimizer.methods() {
            for &n in &sw.qubits {
                for &h in &sw.h {
                    points.push((kind, method, n, h));
                }
            }
        }
    }
    let mut runs = Table::new(
        "runs",
        &[
            "ansatz",
            "method",
            "qubits",
            "h",
            "time",
            "replication",
            "seed",
            "infidelity",
        ],
    );
    let mut scan = Table::new(
        "scan",
        &[
            "ansatz",
            "method",
            "qubits",
            "h",
            "time",
            "trotter_steps",
            "mean_infidelity",
            "std_infidelity",
            "min_infidelity",
            "success_fraction",
            "w1",
            "log_infidelity_time",
        ],
    );
    let mut values = BTreeMap::new();
    for &(kind, method, n, h) in &points {
        let t = speed_limit_time(h, n, cfg.chain.coupling);
        let out = replicate(ctx, kind, method, n, n, t)?;
        let inf: Vec<f64> = out.iter().map(RunOutcome::infidelity).collect();
        let fid: Vec<f64> = out.iter().map(|o| o.fidelity).collect();
        let (a, m) = (kind.name(), method.name());
        for (i, o) in out.iter().enumerate() {
            runs.push(row![a, m, n, h, t, i, o.seed, o.infidelity()]);
        }
        let mean_inf = mean(&inf);
        let w1 = w1_optimality(&fid, cfg.metrics.epsilon)?;
        let success = success_fraction(&inf, cfg.metrics.threshold);
        let min = inf.iter().copied().fold(f64::INFINITY, f64::min);
        scan.push(row![
            a,
            m,
            n,
            h,
            t,
            n,
            mean_inf,
            std_dev(&inf),
            min,
            success,
            w1,
            mean_inf.log10() * t
        ]);
        values.insert(format!("mean_infidelity.{a}.{m}.N{n}.h{h}"), mean_inf);
        values.insert(format!("success_fraction.{a}.{m}.N{n}.h{h}"), success);
    }
    let mut tables = vec![runs, scan];

    if let Some(b) = &sw.bisection {
        let kind = cfg.kinds()[0];
        let method = cfg.optimizer.methods()[0];
        let (n, nt) = (cfg.chain.qubits, cfg.chain.trotter_steps);
        let mut table = Table::new(
            "bisection",
            &[
                "step",
                "time",
                "success_fraction",
                "min_infidelity",
                "feasible",
                "lo",
                "hi",
            ],
        );
        let (mut lo, mut hi) = (b.lo, b.hi);
        let probe = |step: usize, t: f64, lo: f64, hi: f64, table: &mut Table| -> Result<bool> {
            let inf: Vec<f64> = replicate(ctx, kind, method, n, nt, t)?
                .iter()
                .map(RunOutcome::infidelity)
                .collect();
            let frac = success_fraction(&inf, cfg.metrics.threshold);
            let feasible = frac >= cfg.metrics.feasible_fraction;
            let min = inf.iter().copied().fold(f64::INFINITY, f64::min);
            table.push(row![step, t, frac, min, feasible, lo, hi]);
            Ok(feasible)
        };
        let hi_ok = probe(0, hi, lo, hi, &mut table)?;
        let lo_ok = probe(1, lo, lo, hi, &mut table)?;
        let minimum = if !hi_ok {
            f64::NAN
        } else if lo_ok {
            lo
        } else {
            let mut step = 2;
            while hi - lo > b.tolerance {
                let mid = 0.5 * (lo + hi);
                if probe(step, mid, lo, hi, &mut table)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
                step += 1;
            }
            hi
        };
        values.insert("minimum_time".into(), minimum);
        values.insert("minimum_time_lower".into(), lo);
        tables.push(table);
    }
    Ok((tables, values))
}

fn replicate(
    ctx: &Context,
    kind: AnsatzKind,
    method: Method,
    n: usize,
    nt: usize,
    t: f64,
) -> Result<Vec<RunOutcome>> {
    let cfg = ctx.cfg;
    let setup = ctx.setup(n, nt, t)?;
    let reps: Vec<u64> = (0..cfg.replications as u64).collect();
    ctx.par_map(&reps, |&i| {
        let seed = replication_seed(cfg.seed, i);
        optimize_random(
            kind,
            setup,
            method,
            cfg.optimizer.budget,
            seed,
            &ctx.settings,
            None,
        )
    })
}

fn success_fraction(infidelities: &[f64], threshold: f64) -> f64 {
    infidelities.iter().filter(|&&x| x <= threshold).count() as f64 / infidelities.len() as f64
}
