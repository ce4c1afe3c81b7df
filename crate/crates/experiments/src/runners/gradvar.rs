//! Variance of the cost gradient over random initializations, against the
//! chain length and against the total time.

use std::collections::BTreeMap;

use vqoc_core::optimize::{gradient_variance, CostEvaluator};
use vqoc_core::{AnsatzKind, ControlPolicy};

use super::common::{fit_line, Context};
use crate::error::Result;
use crate::record::Table;
use crate::row;
use crate::seed::{replication_seed, stream_seed, GRADIENT_STREAM};

/// Tables:
/// - `vs_qubits`: ansatz, qubits, time, trotter_steps, variance, log2_variance
///   (`T = h(N − 1)/J0`, `N_t = N`)
/// - `vs_time`: ansatz, qubits, time, trotter_steps, variance, ln_time, ln_variance
///   (fixed `N`, `N_t = 2N`)
/// - `slopes`: ansatz, sweep, slope, intercept; least-squares fits of
///   `log2 Var` against `N` and of `ln Var` against `ln T`
pub fn run(ctx: &Context) -> Result<(Vec<Table>, BTreeMap<String, f64>)> {
    let cfg = ctx.cfg;
    let sw = &cfg.sweep;
    let mut points: Vec<(AnsatzKind, usize, usize, f64, bool)> = Vec::new();
    for kind in cfg.kinds() {
        for &n in &sw.qubits {
            points.push((kind, n, n, cfg.chain.total_time(n).expect("validated"), true));
        }
        for &t in &sw.times {
            let n = cfg.chain.qubits;
            points.push((kind, n, 2 * n, t, false));
        }
    }
    let variances = ctx.par_map(&points, |&(kind, n, nt, t, by_qubits)| {
        let setup = ctx.setup(n, nt, t)?;
        let mut ev = CostEvaluator::new(ControlPolicy::random(kind, setup, 0)?)?;
        // the stream depends only on the point, not on scheduling
        let tag = if by_qubits { n as u64 } else { t.to_bits() };
        let seed = stream_seed(replication_seed(cfg.seed, tag), GRADIENT_STREAM);
        Ok(gradient_variance(
            &mut ev,
            cfg.metrics.gradient_samples,
            cfg.metrics.delta,
            seed,
        )?)
    })?;

    let mut vq = Table::new(
        "vs_qubits",
        &[
            "ansatz",
            "qubits",
            "time",
            "trotter_steps",
            "variance",
            "log2_variance",
        ],
    );
    let mut vt = Table::new(
        "vs_time",
        &[
            "ansatz",
            "qubits",
            "time",
            "trotter_steps",
            "variance",
            "ln_time",
            "ln_variance",
        ],
    );
    let mut slopes = Table::new("slopes", &["ansatz", "sweep", "slope", "intercept"]);
    let mut values = BTreeMap::new();
    for kind in cfg.kinds() {
        let mut q_fit = (Vec::new(), Vec::new());
        let mut t_fit = (Vec::new(), Vec::new());
        for (&(k, n, nt, t, by_qubits), &var) in points.iter().zip(&variances) {
            if k != kind {
                continue;
            }
            if by_qubits {
                vq.push(row![kind.name(), n, t, nt, var, var.log2()]);
                q_fit.0.push(n as f64);
                q_fit.1.push(var.log2());
            } else {
                vt.push(row![kind.name(), n, t, nt, var, t.ln(), var.ln()]);
                t_fit.0.push(t.ln());
                t_fit.1.push(var.ln());
            }
        }
        for (sweep, (xs, ys)) in [("qubits", q_fit), ("time", t_fit)] {
            if xs.len() >= 2 {
                let (slope, intercept) = fit_line(&xs, &ys);
                slopes.push(row![kind.name(), sweep, slope, intercept]);
                values.insert(format!("slope.{sweep}.{}", kind.name()), slope);
            }
        }
    }
    Ok((vec![vq, vt, slopes], values))
}
