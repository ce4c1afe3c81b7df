//! Simulation and variational optimal control of single-excitation transfer
//! along a Heisenberg-XY spin chain.
//!
//! The chain Hamiltonian `H = −(J0/2) Σ (XX + YY) + Σ B_n Z_n` is evolved by a
//! first-order Trotterized circuit of `Rz` and `Rxy` layers whose angles are
//! set by one of three control ansätze. The crate provides the dense
//! simulator, a reference propagator, the evaluation metrics, depolarizing
//! noise and budgeted optimizers.
//!
//! ```
//! use vqoc_core::{AnsatzKind, ChainSetup, ControlPolicy, CostEvaluator};
//!
//! let setup = ChainSetup::new(4, 4, 2.0).unwrap();
//! let policy = ControlPolicy::random(AnsatzKind::FreeField, setup, 7).unwrap();
//! let params = policy.params().to_vec();
//! let mut cost = CostEvaluator::new(policy).unwrap();
//! let infidelity = cost.infidelity(&params).unwrap();
//! assert!((0.0..=1.0).contains(&infidelity));
//! ```

pub mod ansatz;
pub mod circuit;
pub mod error;
pub mod gate;
pub mod hamiltonian;
pub mod linalg;
pub mod metrics;
pub mod noise;
pub mod optimize;
pub mod propagator;
pub mod state;

/// Crate version, recorded in experiment metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use ansatz::{
    build_circuit, init_params, init_params_with, smooth_policy, AnsatzKind, ChainSetup, ControlPolicy,
    StepConvention,
};
pub use circuit::{circuit_unitary, run_circuit, GateSequence};
pub use error::{Error, Result};
pub use gate::{apply_gate, Gate};
pub use hamiltonian::{build_hamiltonian, HamiltonianSpec};
pub use noise::{NoiseConfig, Shots};
pub use optimize::{CostEvaluator, Method, OptimizationTrace, OptimizerSettings};
pub use propagator::{exact_propagator, exact_propagator_with, Interpolation};
pub use state::{single_excitation_population, DensityMatrix, StateVector};
