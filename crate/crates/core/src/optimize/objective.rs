use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ansatz::{build_circuit, ControlPolicy};
use crate::circuit::run_circuit;
use crate::error::{Error, Result};
use crate::noise::{run_noisy_circuit, sample_fidelity, NoiseConfig, Shots, MAX_DENSITY_QUBITS};
use crate::state::{DensityMatrix, StateVector};

/// A counted scalar cost over a real parameter vector.
pub trait Objective {
    fn dim(&self) -> usize;

    /// Evaluates the cost and increments the evaluation counter by one.
    fn evaluate(&mut self, params: &[f64]) -> Result<f64>;

    /// Evaluations performed so far.
    fn evaluations(&self) -> u64;
}

/// Wraps a closure as an [`Objective`].
pub struct FnObjective<F> {
    dim: usize,
    f: F,
    evaluations: u64,
}

impl<F: FnMut(&[f64]) -> f64> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self {
            dim,
            f,
            evaluations: 0,
        }
    }
}

impl<F: FnMut(&[f64]) -> f64> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&mut self, params: &[f64]) -> Result<f64> {
        if params.len() != self.dim {
            return Err(Error::ParameterCount {
                expected: self.dim,
                found: params.len(),
            });
        }
        self.evaluations += 1;
        Ok((self.f)(params))
    }

    fn evaluations(&self) -> u64 {
        self.evaluations
    }
}

/// Infidelity `1 − F` between the circuit output and a target state.
///
/// The default transfer problem starts from the first-site excitation and
/// targets the last site. With a noise model attached the state is evolved
/// on the density-matrix path and, for a finite shot count, the fidelity is
/// a binomial estimate drawn from the evaluator's own seeded stream. A model
/// without channels keeps the statevector path, so its exact costs are
/// bit-identical to the noiseless ones.
#[derive(Debug, Clone)]
pub struct CostEvaluator {
    policy: ControlPolicy,
    initial: StateVector,
    target: StateVector,
    noise: Option<(NoiseConfig, Option<DensityMatrix>)>,
    shot_rng: ChaCha8Rng,
    evaluations: u64,
}

impl CostEvaluator {
    pub fn new(template: ControlPolicy) -> Result<Self> {
        let n = template.num_qubits();
        let initial = StateVector::excitation(n, 1)?;
        let target = StateVector::excitation(n, n)?;
        Self::with_states(template, initial, target)
    }

    pub fn with_states(template: ControlPolicy, initial: StateVector, target: StateVector) -> Result<Self> {
        let n = template.num_qubits();
        for s in [&initial, &target] {
            if s.num_qubits() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.num_qubits(),
                });
            }
        }
        Ok(Self {
            policy: template,
            initial,
            target,
            noise: None,
            shot_rng: ChaCha8Rng::seed_from_u64(0),
            evaluations: 0,
        })
    }

    /// Attaches a noise model; `shot_seed` drives the measurement sampling.
    pub fn with_noise(mut self, cfg: NoiseConfig, shot_seed: u64) -> Result<Self> {
        let n = self.policy.num_qubits();
        if n > MAX_DENSITY_QUBITS {
            return Err(Error::TooManyQubits {
                max: MAX_DENSITY_QUBITS,
                found: n,
            });
        }
        cfg.validate(n)?;
        let rho0 = cfg.has_channels().then(|| self.initial.to_density());
        self.noise = Some((cfg, rho0));
        self.shot_rng = ChaCha8Rng::seed_from_u64(shot_seed);
        Ok(self)
    }

    pub fn template(&self) -> &ControlPolicy {
        &self.policy
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn target(&self) -> &StateVector {
        &self.target
    }

    pub fn noise(&self) -> Option<&NoiseConfig> {
        self.noise.as_ref().map(|(cfg, _)| cfg)
    }

    pub fn reset_count(&mut self) {
        self.evaluations = 0;
    }

    /// Counted cost evaluation.
    pub fn infidelity(&mut self, params: &[f64]) -> Result<f64> {
        let f = match self.noise {
            Some((cfg, _)) => {
                let exact = self.fidelity_exact(params)?;
                match cfg.shots {
                    Shots::Exact => exact,
                    Shots::Count(n) => sample_fidelity(exact, n, &mut self.shot_rng)?,
                }
            }
            None => self.fidelity_exact(params)?,
        };
        self.evaluations += 1;
        Ok((1.0 - f).clamp(0.0, 1.0))
    }

    /// Fidelity with the target without shot sampling and without touching
    /// the evaluation counter. Noise channels, if any, are applied.
    pub fn fidelity(&self, params: &[f64]) -> Result<f64> {
        self.fidelity_exact(params)
    }

    fn fidelity_exact(&self, params: &[f64]) -> Result<f64> {
        let policy = self.policy.with_params(params.to_vec())?;
        let seq = build_circuit(&policy)?;
        let f = match &self.noise {
            Some((cfg, Some(rho0))) => run_noisy_circuit(&seq, rho0, cfg)?.expectation_pure(&self.target)?,
            _ => run_circuit(&seq, &self.initial)?.inner(&self.target)?.norm_sqr(),
        };
        if !f.is_finite() {
            return Err(Error::NonFinite("fidelity"));
        }
        Ok(f.clamp(0.0, 1.0))
    }
}

impl Objective for CostEvaluator {
    fn dim(&self) -> usize {
        self.policy.params().len()
    }

    fn evaluate(&mut self, params: &[f64]) -> Result<f64> {
        self.infidelity(params)
    }

    fn evaluations(&self) -> u64 {
        self.evaluations
    }
}

/// `1 − F` for `params`; one counted evaluation.
pub fn infidelity_cost(params: &[f64], evaluator: &mut CostEvaluator) -> Result<f64> {
    evaluator.infidelity(params)
}
