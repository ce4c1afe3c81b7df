use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{build_circuit, init_params_with, ControlPolicy};
use crate::circuit::run_circuit;
use crate::error::{Error, Result};
use crate::state::StateVector;

pub const DEFAULT_BINS: usize = 75;

/// Added to every empirical bin probability before renormalizing.
pub const BIN_SMOOTHING: f64 = 1e-12;

/// Density of `F = |⟨φ|ψ⟩|²` for Haar-random pure states on `N` qubits,
/// `(2^N − 1)(1 − F)^(2^N − 2)`.
pub fn haar_fidelity_pdf(f: f64, num_qubits: usize) -> f64 {
    let d = (1u64 << num_qubits) as f64;
    (d - 1.0) * (1.0 - f).powf(d - 2.0)
}

/// Haar probability mass of `[lo, hi]`, `(1 − lo)^(2^N−1) − (1 − hi)^(2^N−1)`.
pub fn haar_bin_probability(lo: f64, hi: f64, num_qubits: usize) -> f64 {
    let e = ((1u64 << num_qubits) - 1) as f64;
    (1.0 - lo).powf(e) - (1.0 - hi).powf(e)
}

/// Haar probabilities of `bins` uniform bins on `[0, 1]`.
pub fn haar_histogram(bins: usize, num_qubits: usize) -> Vec<f64> {
    (0..bins)
        .map(|b| haar_bin_probability(b as f64 / bins as f64, (b + 1) as f64 / bins as f64, num_qubits))
        .collect()
}

/// Inverse-CDF draw from the Haar fidelity law, `F = 1 − u^(1/(2^N−1))`.
pub fn sample_haar_fidelity<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> f64 {
    let e = ((1u64 << num_qubits) - 1) as f64;
    let u: f64 = rng.random();
    1.0 - u.powf(1.0 / e)
}

/// Normalized histogram of samples in `[0, 1]`; `F = 1` falls in the last bin.
pub fn fidelity_histogram(samples: &[f64], bins: usize) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    if bins == 0 {
        return Err(Error::InvalidArgument("at least one bin required".into()));
    }
    let mut counts = vec![0usize; bins];
    for &f in samples {
        if !f.is_finite() {
            return Err(Error::NonFinite("fidelity sample"));
        }
        let b = ((f.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let n = samples.len() as f64;
    Ok(counts.into_iter().map(|c| c as f64 / n).collect())
}

/// `D_KL(P ‖ Q)` with [`BIN_SMOOTHING`] added to `P` and renormalized.
/// Bins where `Q` underflows to zero are floored at the smallest positive
/// double so the result stays finite.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            found: p.len(),
        });
    }
    let total: f64 = p.iter().map(|x| x + BIN_SMOOTHING).sum();
    let kl = p
        .iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            let ps = (pi + BIN_SMOOTHING) / total;
            ps * (ps / qi.max(f64::MIN_POSITIVE)).ln()
        })
        .sum::<f64>();
    // the sum is ≥ 0 analytically; clip round-off
    Ok(kl.max(0.0))
}

/// KL divergence of a sample set from the Haar fidelity law on `N` qubits.
pub fn kl_from_haar(samples: &[f64], bins: usize, num_qubits: usize) -> Result<f64> {
    kl_divergence(
        &fidelity_histogram(samples, bins)?,
        &haar_histogram(bins, num_qubits),
    )
}

/// Fidelities `|⟨ψ(θ₂)|ψ(θ₁)⟩|²` between circuit outputs for independently
/// drawn parameter pairs, all starting from the first-site excitation.
pub fn circuit_fidelity_samples(template: &ControlPolicy, num_pairs: usize, seed: u64) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let setup = *template.setup();
    let kind = template.kind();
    let initial = StateVector::excitation(setup.num_qubits, 1)?;
    let mut out = Vec::with_capacity(num_pairs);
    for _ in 0..num_pairs {
        let a = template.with_params(init_params_with(kind, &setup, &mut rng))?;
        let b = template.with_params(init_params_with(kind, &setup, &mut rng))?;
        let psi_a = run_circuit(&build_circuit(&a)?, &initial)?;
        let psi_b = run_circuit(&build_circuit(&b)?, &initial)?;
        out.push(psi_b.inner(&psi_a)?.norm_sqr().min(1.0));
    }
    Ok(out)
}

/// Expressibility of the ansatz family of `template`: KL divergence of its
/// pair-fidelity histogram from the Haar law. Requires
/// `num_pairs ≥ 10 · num_bins`.
pub fn expressibility_kl(
    template: &ControlPolicy,
    num_pairs: usize,
    num_bins: usize,
    seed: u64,
) -> Result<f64> {
    if num_bins == 0 || num_pairs < 10 * num_bins {
        return Err(Error::InvalidArgument(format!(
            "{num_pairs} pairs is fewer than 10 per bin for {num_bins} bins"
        )));
    }
    let samples = circuit_fidelity_samples(template, num_pairs, seed)?;
    kl_from_haar(&samples, num_bins, template.num_qubits())
}
