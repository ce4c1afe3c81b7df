//! Optimality over the grid of learning budgets and Trotter steps, with
//! the Trotter error and expressibility of each step count.

use std::collections::BTreeMap;

use vqoc_core::metrics::{expressibility_kl, trotter_error_with, w1_optimality};
use vqoc_core::ControlPolicy;

use super::common::{mean, optimize_random, std_dev, Context};
use crate::error::Result;
use crate::record::Table;
use crate::row;
use crate::seed::{replication_seed, stream_seed, PAIR_STREAM};

/// Tables:
/// - `w1`: ansatz, method, trotter_steps, budget, w1, mean_infidelity, std_infidelity
/// - `trotter_kl`: ansatz, trotter_steps, mean_xi, std_xi, kl (ξ over the random initial policies)
/// - `guide`: trotter_steps, n_lea (reference curve `2^{N_t}` with prefactor 1)
pub fn run(ctx: &Context) -> Result<(Vec<Table>, BTreeMap<String, f64>)> {
    let cfg = ctx.cfg;
    let sw = &cfg.sweep;
    let n = cfg.chain.qubits;
    let time = cfg.chain.total_time(n).expect("validated");
    let reps = cfg.replications;

    let mut jobs = Vec::new();
    for kind in cfg.kinds() {
        for method in cfg.optimizer.methods() {
            for &nt in &sw.trotter_steps {
                for &budget in &sw.budgets {
                    for i in 0..reps {
                        jobs.push((kind, method, nt, budget, i));
                    }
                }
            }
        }
    }
    let outcomes = ctx.par_map(&jobs, |&(kind, method, nt, budget, i)| {
        let setup = ctx.setup(n, nt, time)?;
        let seed = replication_seed(cfg.seed, i as u64);
        optimize_random(kind, setup, method, budget, seed, &ctx.settings, None)
    })?;

    let mut w1_table = Table::new(
        "w1",
        &[
            "ansatz",
            "method",
            "trotter_steps",
            "budget",
            "w1",
            "mean_infidelity",
            "std_infidelity",
        ],
    );
    let mut values = BTreeMap::new();
    for (block, chunk) in outcomes.chunks(reps).enumerate() {
        let (kind, method, nt, budget, _) = jobs[block * reps];
        let fid: Vec<f64> = chunk.iter().map(|o| o.fidelity).collect();
        let inf: Vec<f64> = chunk.iter().map(|o| o.infidelity()).collect();
        let w1 = w1_optimality(&fid, cfg.metrics.epsilon)?;
        let (a, m) = (kind.name(), method.name());
        w1_table.push(row![a, m, nt, budget, w1, mean(&inf), std_dev(&inf)]);
        values.insert(format!("w1.{a}.{m}.Nt{nt}.B{budget}"), w1);
    }

    let mut cells = Vec::new();
    for kind in cfg.kinds() {
        for &nt in &sw.trotter_steps {
            cells.push((kind, nt));
        }
    }
    let per_cell = ctx.par_map(&cells, |&(kind, nt)| {
        let setup = ctx.setup(n, nt, time)?;
        let xi = (0..reps as u64)
            .map(|i| {
                let p = ControlPolicy::random(kind, setup, replication_seed(cfg.seed, i))?;
                Ok(trotter_error_with(
                    &p,
                    cfg.metrics.substeps,
                    cfg.metrics.interpolation(),
                )?)
            })
            .collect::<Result<Vec<f64>>>()?;
        let kl = if cfg.metrics.pairs > 0 {
            let template = ControlPolicy::random(kind, setup, 0)?;
            expressibility_kl(
                &template,
                cfg.metrics.pairs,
                cfg.metrics.bins,
                stream_seed(cfg.seed, PAIR_STREAM),
            )?
        } else {
            f64::NAN
        };
        Ok((xi, kl))
    })?;
    let mut tk = Table::new(
        "trotter_kl",
        &["ansatz", "trotter_steps", "mean_xi", "std_xi", "kl"],
    );
    for (&(kind, nt), (xi, kl)) in cells.iter().zip(&per_cell) {
        tk.push(row![kind.name(), nt, mean(xi), std_dev(xi), *kl]);
    }

    let mut guide = Table::new("guide", &["trotter_steps", "n_lea"]);
    for &nt in &sw.trotter_steps {
        guide.push(row![nt, 2f64.powi(nt as i32)]);
    }
    Ok((vec![w1_table, tk, guide], values))
}
