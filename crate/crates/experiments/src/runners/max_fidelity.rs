//! Maximum-fidelity control: random initializations optimized to a fixed
//! budget, summarized by the optimality metric and the expressibility.

use std::collections::BTreeMap;

use vqoc_core::metrics::{expressibility_kl, w1_optimality, OptimalityConfig};
use vqoc_core::ControlPolicy;

use super::common::{mean, optimize_random, Context};
use crate::error::Result;
use crate::record::Table;
use crate::row;
use crate::seed::{replication_seed, stream_seed, PAIR_STREAM};

/// Tables:
/// - `fidelity_pairs`: ansatz, method, replication, seed, f_random, f_learned, evaluations
/// - `cdf`: ansatz, method, stage, x, cdf (empirical CDF of clamped log10 infidelity)
/// - `summary`: ansatz, method, replications, mean_f_random, mean_f_learned, w1_random, w1_learned, kl
pub fn run(ctx: &Context) -> Result<(Vec<Table>, BTreeMap<String, f64>)> {
    let cfg = ctx.cfg;
    let n = cfg.chain.qubits;
    let time = cfg.chain.total_time(n).expect("validated");
    let setup = ctx.setup(n, cfg.chain.trotter_steps, time)?;
    let eps = cfg.metrics.epsilon;
    let budget = cfg.optimizer.budget;

    let mut jobs = Vec::new();
    for kind in cfg.kinds() {
        for method in cfg.optimizer.methods() {
            for i in 0..cfg.replications {
                jobs.push((kind, method, i));
            }
        }
    }
    let outcomes = ctx.par_map(&jobs, |&(kind, method, i)| {
        let seed = replication_seed(cfg.seed, i as u64);
        optimize_random(kind, setup, method, budget, seed, &ctx.settings, None)
    })?;

    let kl_jobs = if cfg.metrics.pairs > 0 {
        cfg.kinds()
    } else {
        Vec::new()
    };
    let kls = ctx.par_map(&kl_jobs, |&kind| {
        let template = ControlPolicy::random(kind, setup, 0)?;
        Ok(expressibility_kl(
            &template,
            cfg.metrics.pairs,
            cfg.metrics.bins,
            stream_seed(cfg.seed, PAIR_STREAM),
        )?)
    })?;

    let mut pairs = Table::new(
        "fidelity_pairs",
        &[
            "ansatz",
            "method",
            "replication",
            "seed",
            "f_random",
            "f_learned",
            "evaluations",
        ],
    );
    let mut cdf = Table::new("cdf", &["ansatz", "method", "stage", "x", "cdf"]);
    let mut summary = Table::new(
        "summary",
        &[
            "ansatz",
            "method",
            "replications",
            "mean_f_random",
            "mean_f_learned",
            "w1_random",
            "w1_learned",
            "kl",
        ],
    );
    let mut values = BTreeMap::new();
    let opt = OptimalityConfig::new(eps)?;

    for (block, chunk) in outcomes.chunks(cfg.replications).enumerate() {
        let (kind, method, _) = jobs[block * cfg.replications];
        let (a, m) = (kind.name(), method.name());
        for (i, o) in chunk.iter().enumerate() {
            pairs.push(row![
                a,
                m,
                i,
                o.seed,
                o.initial_fidelity,
                o.fidelity,
                o.evaluations()
            ]);
        }
        let f_rand: Vec<f64> = chunk.iter().map(|o| o.initial_fidelity).collect();
        let f_lea: Vec<f64> = chunk.iter().map(|o| o.fidelity).collect();
        for (stage, fs) in [("random", &f_rand), ("learned", &f_lea)] {
            let mut xs = opt.log_infidelities(fs)?;
            xs.sort_by(f64::total_cmp);
            let len = xs.len() as f64;
            for (k, x) in xs.iter().enumerate() {
                cdf.push(row![a, m, stage, *x, (k + 1) as f64 / len]);
            }
        }
        let w1_rand = w1_optimality(&f_rand, eps)?;
        let w1_lea = w1_optimality(&f_lea, eps)?;
        let kl = kl_jobs
            .iter()
            .position(|&k| k == kind)
            .map_or(f64::NAN, |j| kls[j]);
        summary.push(row![
            a,
            m,
            chunk.len(),
            mean(&f_rand),
            mean(&f_lea),
            w1_rand,
            w1_lea,
            kl
        ]);
        values.insert(format!("w1.{a}.{m}"), w1_lea);
        values.insert(format!("w1_random.{a}.{m}"), w1_rand);
        if kl.is_finite() {
            values.insert(format!("kl.{a}"), kl);
        }
    }
    Ok((vec![pairs, cdf, summary], values))
}
