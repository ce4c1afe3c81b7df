use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ansatz::init_params_with;
use crate::error::{Error, Result};
use crate::optimize::{CostEvaluator, Objective};

pub const DEFAULT_DELTA: f64 = 1e-4;

/// `(J(λ_k + Δλ) − J(λ_k − Δλ)) / 2Δλ`; exactly two evaluations.
///
/// `Δλ` must be positive and at most a tenth of `|λ_k| + 1`.
pub fn central_diff_gradient<O: Objective + ?Sized>(
    params: &[f64],
    k: usize,
    delta: f64,
    obj: &mut O,
) -> Result<f64> {
    if k >= params.len() {
        return Err(Error::InvalidArgument(format!(
            "parameter index {k} out of range for {} parameters",
            params.len()
        )));
    }
    if !(delta > 0.0 && delta <= 0.1 * (params[k].abs() + 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {delta} not small and positive"
        )));
    }
    let mut probe = params.to_vec();
    probe[k] = params[k] + delta;
    let fp = obj.evaluate(&probe)?;
    probe[k] = params[k] - delta;
    let fm = obj.evaluate(&probe)?;
    let g = (fp - fm) / (2.0 * delta);
    if !g.is_finite() {
        return Err(Error::NonFinite("gradient"));
    }
    Ok(g)
}

/// Gradient samples at fresh random initializations of the evaluator's
/// ansatz, one uniformly chosen parameter per sample.
pub fn gradient_samples(
    evaluator: &mut CostEvaluator,
    num_samples: usize,
    delta: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kind = evaluator.template().kind();
    let setup = *evaluator.template().setup();
    (0..num_samples)
        .map(|_| {
            let params = init_params_with(kind, &setup, &mut rng);
            let k = rng.random_range(0..params.len());
            central_diff_gradient(&params, k, delta, evaluator)
        })
        .collect()
}

/// Unbiased sample variance of the cost gradient over random
/// initializations. Requires at least 30 samples.
pub fn gradient_variance(
    evaluator: &mut CostEvaluator,
    num_samples: usize,
    delta: f64,
    seed: u64,
) -> Result<f64> {
    if num_samples < 30 {
        return Err(Error::InvalidArgument(format!(
            "{num_samples} samples, at least 30 required"
        )));
    }
    sample_variance(&gradient_samples(evaluator, num_samples, delta, seed)?)
}

/// Unbiased variance `Σ(x − x̄)² / (n − 1)`.
pub fn sample_variance(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::EmptySamples);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    Ok(xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0))
}
