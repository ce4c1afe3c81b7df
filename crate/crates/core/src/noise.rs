//! Depolarizing noise, SPAM and per-layer error placement, and shot-noise
//! fidelity estimates on the density-matrix path.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::{run_in_place, GateSequence};
use crate::error::{Error, Result};
use crate::state::{DensityMatrix, StateVector};

/// Largest register simulated with density matrices.
pub const MAX_DENSITY_QUBITS: usize = 8;

/// How the final fidelity is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shots {
    /// Exact expectation value.
    #[default]
    Exact,
    /// Binomial estimate from this many projective measurements.
    Count(u64),
}

/// Depolarizing probabilities for SPAM and per-Trotter-layer errors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseConfig {
    pub p_spam: f64,
    pub p_gate: f64,
    pub shots: Shots,
}

impl NoiseConfig {
    pub fn new(p_spam: f64, p_gate: f64, shots: Shots) -> Self {
        Self {
            p_spam,
            p_gate,
            shots,
        }
    }

    pub fn noiseless() -> Self {
        Self::default()
    }

    /// Checks both probabilities against the channel-validity range for
    /// `num_qubits` qubits and that the shot count is positive.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        check_probability(self.p_spam, num_qubits)?;
        check_probability(self.p_gate, num_qubits)?;
        if self.shots == Shots::Count(0) {
            return Err(Error::InvalidArgument("shot count must be positive".into()));
        }
        Ok(())
    }

    pub fn has_channels(&self) -> bool {
        self.p_spam != 0.0 || self.p_gate != 0.0
    }
}

/// Upper end of the valid depolarizing range, `4^N / (4^N − 1)`.
pub fn max_depolarizing_probability(num_qubits: usize) -> f64 {
    let d2 = 4f64.powi(num_qubits as i32);
    d2 / (d2 - 1.0)
}

fn check_probability(p: f64, num_qubits: usize) -> Result<()> {
    let max = max_depolarizing_probability(num_qubits);
    if !(0.0..=max).contains(&p) {
        return Err(Error::InvalidProbability { p, max });
    }
    Ok(())
}

/// `(1 − p)ρ + p Tr[ρ] I / 2^N`.
pub fn depolarize(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_probability(p, rho.num_qubits())?;
    let mut out = rho.clone();
    depolarize_in_place(&mut out, p);
    Ok(out)
}

fn depolarize_in_place(rho: &mut DensityMatrix, p: f64) {
    if p == 0.0 {
        return;
    }
    let dim = rho.dim();
    let shift = p * rho.trace().re / dim as f64;
    let m = rho.matrix_mut();
    *m *= Complex64::new(1.0 - p, 0.0);
    for i in 0..dim {
        m[(i, i)] += Complex64::new(shift, 0.0);
    }
}

/// `ρ → U ρ U†` for the unitary of `gates`.
fn conjugate_in_place(rho: &mut DensityMatrix, gates: &[crate::gate::Gate]) {
    let dim = rho.dim();
    let m = rho.matrix_mut();
    // columns are contiguous: applying U column by column gives Uρ
    for col in m.as_mut_slice().chunks_mut(dim) {
        run_in_place(gates, col);
    }
    // (Uρ)† = ρU†, and U(ρU†) = UρU†
    m.adjoint_mut();
    for col in m.as_mut_slice().chunks_mut(dim) {
        run_in_place(gates, col);
    }
}

/// Runs `seq` on `initial` with SPAM depolarization after preparation and
/// before readout, and gate depolarization after every Trotter layer.
pub fn run_noisy_circuit(
    seq: &GateSequence,
    initial: &DensityMatrix,
    cfg: &NoiseConfig,
) -> Result<DensityMatrix> {
    let n = initial.num_qubits();
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits {
            max: MAX_DENSITY_QUBITS,
            found: n,
        });
    }
    if seq.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: seq.num_qubits(),
            found: n,
        });
    }
    cfg.validate(n)?;
    let mut rho = initial.clone();
    depolarize_in_place(&mut rho, cfg.p_spam);
    for layer in seq.layers() {
        conjugate_in_place(&mut rho, layer);
        depolarize_in_place(&mut rho, cfg.p_gate);
    }
    depolarize_in_place(&mut rho, cfg.p_spam);
    Ok(rho)
}

/// Fraction of `shots` successful projections onto `target`, drawn from a
/// binomial with the exact success probability `⟨target|ρ|target⟩`.
pub fn shot_fidelity(rho: &DensityMatrix, target: &StateVector, shots: u64, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shot_fidelity_with(rho, target, shots, &mut rng)
}

pub fn shot_fidelity_with<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    target: &StateVector,
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    let f = rho.expectation_pure(target)?;
    sample_fidelity(f, shots, rng)
}

/// Binomial estimate of a success probability `f` from `shots` trials.
pub fn sample_fidelity<R: Rng + ?Sized>(f: f64, shots: u64, rng: &mut R) -> Result<f64> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be positive".into()));
    }
    if !f.is_finite() {
        return Err(Error::NonFinite("fidelity"));
    }
    let dist = Binomial::new(shots, f.clamp(0.0, 1.0)).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(dist.sample(rng) as f64 / shots as f64)
}
