//! Expressibility of each ansatz against the Haar fidelity law.

use std::collections::BTreeMap;

use vqoc_core::metrics::{circuit_fidelity_samples, fidelity_histogram, haar_histogram, kl_from_haar};
use vqoc_core::ControlPolicy;

use super::common::Context;
use crate::config::steps_or;
use crate::error::Result;
use crate::record::Table;
use crate::row;
use crate::seed::{stream_seed, PAIR_STREAM};

/// Tables:
/// - `kl`: ansatz, trotter_steps, pairs, bins, kl
/// - `histogram`: ansatz, trotter_steps, bin, lo, hi, empirical, haar (unsmoothed probabilities)
pub fn run(ctx: &Context) -> Result<(Vec<Table>, BTreeMap<String, f64>)> {
    let cfg = ctx.cfg;
    let n = cfg.chain.qubits;
    let time = cfg.chain.total_time(n).expect("validated");
    let (pairs, bins) = (cfg.metrics.pairs, cfg.metrics.bins);
    let mut cells = Vec::new();
    for kind in cfg.kinds() {
        for nt in steps_or(&cfg.sweep.trotter_steps, cfg.chain.trotter_steps) {
            cells.push((kind, nt));
        }
    }
    let samples = ctx.par_map(&cells, |&(kind, nt)| {
        let template = ControlPolicy::random(kind, ctx.setup(n, nt, time)?, 0)?;
        Ok(circuit_fidelity_samples(
            &template,
            pairs,
            stream_seed(cfg.seed, PAIR_STREAM),
        )?)
    })?;

    let mut kl_table = Table::new("kl", &["ansatz", "trotter_steps", "pairs", "bins", "kl"]);
    let mut hist = Table::new(
        "histogram",
        &["ansatz", "trotter_steps", "bin", "lo", "hi", "empirical", "haar"],
    );
    let mut values = BTreeMap::new();
    let haar = haar_histogram(bins, n);
    for (&(kind, nt), s) in cells.iter().zip(&samples) {
        let kl = kl_from_haar(s, bins, n)?;
        kl_table.push(row![kind.name(), nt, pairs, bins, kl]);
        values.insert(format!("kl.{}.Nt{nt}", kind.name()), kl);
        for (b, (p, q)) in fidelity_histogram(s, bins)?.iter().zip(&haar).enumerate() {
            let w = 1.0 / bins as f64;
            hist.push(row![kind.name(), nt, b, b as f64 * w, (b + 1) as f64 * w, *p, *q]);
        }
    }
    Ok((vec![kl_table, hist], values))
}
