//! Evaluation quantities: state fidelity, Trotter error, expressibility and
//! control optimality.

mod expressibility;
mod fidelity;
mod optimality;

pub use expressibility::{
    circuit_fidelity_samples, expressibility_kl, fidelity_histogram, haar_bin_probability, haar_fidelity_pdf,
    haar_histogram, kl_divergence, kl_from_haar, sample_haar_fidelity, BIN_SMOOTHING, DEFAULT_BINS,
};
pub use fidelity::{mixed_pure_fidelity, pure_fidelity, state_fidelity, trotter_error, trotter_error_with};
pub use optimality::{
    empirical_cdf, w1_optimality, w1_optimality_cdf, wasserstein1, EmpiricalDistribution, OptimalityConfig,
    DEFAULT_EPSILON,
};
