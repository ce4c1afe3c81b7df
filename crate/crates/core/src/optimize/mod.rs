//! Budgeted classical optimizers over circuit parameters and the
//! gradient-variance measurement.
//!
//! Every cost call counts towards the learning budget `N_lea`, including
//! the probes used for finite-difference gradients.

mod gradient;
mod methods;
mod objective;
mod trace;

pub use gradient::{
    central_diff_gradient, gradient_samples, gradient_variance, sample_variance, DEFAULT_DELTA,
};
pub use methods::{optimize, AdamSettings, NelderMeadSettings, OptimizerSettings, SpsaSettings};
pub use objective::{infidelity_cost, CostEvaluator, FnObjective, Objective};
pub use trace::{Method, OptimizationTrace};
