//! Optimization under depolarizing noise and finite shots.

use std::collections::BTreeMap;

use vqoc_core::{AnsatzKind, Method, NoiseConfig};

use super::common::{mean, optimize_random, std_dev, Context, RunOutcome};
use crate::error::Result;
use crate::record::Table;
use crate::row;
use crate::seed::replication_seed;

/// Tables:
/// - `traces`: ansatz, method, n_lea, mean_loss, std_loss (recorded cost per evaluation;
///   runs that stopped early carry their last value forward)
/// - `final`: ansatz, method, replication, seed, final_loss, best_cost, fidelity
///   (`final_loss` is the mean of the last `noise.tail` recorded costs)
/// - `loss_vs_p` (with `noise.probabilities`): ansatz, method, p_spam, mean_final_loss,
///   std_final_loss, mean_fidelity
/// - `fidelity_vs_time` (with `sweep.times`): ansatz, method, time, mean_fidelity_noisy,
///   mean_fidelity_ideal
pub fn run(ctx: &Context) -> Result<(Vec<Table>, BTreeMap<String, f64>)> {
    let cfg = ctx.cfg;
    let n = cfg.chain.qubits;
    let time = cfg.chain.total_time(n).expect("validated");
    let tail = cfg.noise.tail;
    let mut values = BTreeMap::new();

    let mut pairs = Vec::new();
    for kind in cfg.kinds() {
        for method in cfg.optimizer.methods() {
            pairs.push((kind, method));
        }
    }

    let model = cfg.noise.model();
    let main = batch(ctx, &pairs, time, Some(model))?;
    let mut traces = Table::new("traces", &["ansatz", "method", "n_lea", "mean_loss", "std_loss"]);
    let mut fin = Table::new(
        "final",
        &[
            "ansatz",
            "method",
            "replication",
            "seed",
            "final_loss",
            "best_cost",
            "fidelity",
        ],
    );
    for (&(kind, method), outs) in pairs.iter().zip(&main) {
        let (a, m) = (kind.name(), method.name());
        for (n_lea, losses) in aligned_losses(outs).into_iter().enumerate() {
            traces.push(row![a, m, n_lea + 1, mean(&losses), std_dev(&losses)]);
        }
        let mut finals = Vec::new();
        for (i, o) in outs.iter().enumerate() {
            let (f, best) = o
                .trace
                .as_ref()
                .map_or((1.0 - o.fidelity, 1.0 - o.fidelity), |t| {
                    (t.tail_mean(tail), t.best_cost)
                });
            fin.push(row![a, m, i, o.seed, f, best, o.fidelity]);
            finals.push(f);
        }
        values.insert(format!("final_loss.{a}.{m}"), mean(&finals));
    }
    let mut tables = vec![traces, fin];

    if !cfg.noise.probabilities.is_empty() {
        let mut t = Table::new(
            "loss_vs_p",
            &[
                "ansatz",
                "method",
                "p_spam",
                "mean_final_loss",
                "std_final_loss",
                "mean_fidelity",
            ],
        );
        for &p in &cfg.noise.probabilities {
            let swept = cfg.noise.with_spam(p);
            // the configured model was already run
            let fresh;
            let outs = if swept == model {
                &main
            } else {
                fresh = batch(ctx, &pairs, time, Some(swept))?;
                &fresh
            };
            for (&(kind, method), outs) in pairs.iter().zip(outs) {
                let (a, m) = (kind.name(), method.name());
                let finals: Vec<f64> = outs.iter().map(|o| final_loss(o, tail)).collect();
                let fid: Vec<f64> = outs.iter().map(|o| o.fidelity).collect();
                t.push(row![a, m, p, mean(&finals), std_dev(&finals), mean(&fid)]);
                values.insert(format!("final_loss.{a}.{m}.p{p}"), mean(&finals));
            }
        }
        tables.push(t);
    }

    if !cfg.sweep.times.is_empty() {
        let mut t = Table::new(
            "fidelity_vs_time",
            &[
                "ansatz",
                "method",
                "time",
                "mean_fidelity_noisy",
                "mean_fidelity_ideal",
            ],
        );
        let method = cfg.optimizer.methods()[0];
        let first: Vec<_> = cfg.kinds().into_iter().map(|k| (k, method)).collect();
        for &time in &cfg.sweep.times {
            let noisy = batch(ctx, &first, time, Some(model))?;
            let ideal = batch(ctx, &first, time, None)?;
            for ((&(kind, _), a), b) in first.iter().zip(&noisy).zip(&ideal) {
                let fa: Vec<f64> = a.iter().map(|o| o.fidelity).collect();
                let fb: Vec<f64> = b.iter().map(|o| o.fidelity).collect();
                t.push(row![kind.name(), method.name(), time, mean(&fa), mean(&fb)]);
            }
        }
        tables.push(t);
    }
    Ok((tables, values))
}

/// All replications of every (ansatz, method) pair, grouped per pair.
fn batch(
    ctx: &Context,
    pairs: &[(AnsatzKind, Method)],
    time: f64,
    noise: Option<NoiseConfig>,
) -> Result<Vec<Vec<RunOutcome>>> {
    let cfg = ctx.cfg;
    let setup = ctx.setup(cfg.chain.qubits, cfg.chain.trotter_steps, time)?;
    let reps = cfg.replications;
    let jobs: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|p| (0..reps).map(move |i| (p, i)))
        .collect();
    let flat = ctx.par_map(&jobs, |&(p, i)| {
        let (kind, method) = pairs[p];
        let seed = replication_seed(cfg.seed, i as u64);
        optimize_random(
            kind,
            setup,
            method,
            cfg.optimizer.budget,
            seed,
            &ctx.settings,
            noise,
        )
    })?;
    Ok(flat.chunks(reps).map(<[RunOutcome]>::to_vec).collect())
}

fn final_loss(o: &RunOutcome, tail: usize) -> f64 {
    o.trace.as_ref().map_or(1.0 - o.fidelity, |t| t.tail_mean(tail))
}

/// Per evaluation index, the recorded cost of every replication; a run
/// that stopped early contributes its last recorded cost.
fn aligned_losses(outs: &[RunOutcome]) -> Vec<Vec<f64>> {
    let histories: Vec<&[(u64, f64)]> = outs
        .iter()
        .filter_map(|o| o.trace.as_ref().map(|t| t.history.as_slice()))
        .filter(|h| !h.is_empty())
        .collect();
    let len = histories.iter().map(|h| h.len()).max().unwrap_or(0);
    (0..len)
        .map(|k| histories.iter().map(|h| h[k.min(h.len() - 1)].1).collect())
        .collect()
}
