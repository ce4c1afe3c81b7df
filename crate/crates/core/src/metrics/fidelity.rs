use nalgebra::DVector;
use num_complex::Complex64;

use crate::ansatz::{build_circuit, ControlPolicy};
use crate::circuit::circuit_unitary;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, spectral_norm, sqrt_psd};
use crate::propagator::{exact_propagator_with, Interpolation};
use crate::state::{DensityMatrix, StateVector};

/// Eigenvalues of `√σ ρ √σ` below this fraction of the largest are treated
/// as round-off; their square roots would otherwise leak ~1e-8 into the trace.
const SPECTRAL_CUTOFF: f64 = 1e-13;

/// Uhlmann fidelity `(Tr √(√σ ρ √σ))²`, clamped to `[0, 1]`. When either
/// state is pure this reduces to `⟨ψ|ρ|ψ⟩`, which is used directly.
pub fn state_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: rho.dim(),
        });
    }
    if let Some(psi) = pure_vector(sigma) {
        return Ok(sandwich(rho, &psi).clamp(0.0, 1.0));
    }
    if let Some(psi) = pure_vector(rho) {
        return Ok(sandwich(sigma, &psi).clamp(0.0, 1.0));
    }
    let s = sqrt_psd(sigma.matrix());
    let inner = &s * rho.matrix() * &s;
    // re-symmetrize against round-off before the spectrum
    let inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let ev = hermitian_eigenvalues(&inner);
    let top = ev.last().copied().unwrap_or(0.0).max(0.0);
    let tr: f64 = ev
        .iter()
        .filter(|&&l| l > SPECTRAL_CUTOFF * top)
        .map(|l| l.sqrt())
        .sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}

/// Dominant eigenvector when the state is pure to within 1e-12 in purity.
fn pure_vector(rho: &DensityMatrix) -> Option<DVector<Complex64>> {
    if (rho.purity() - 1.0).abs() > 1e-12 {
        return None;
    }
    let eig = rho.matrix().clone().symmetric_eigen();
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?;
    Some(eig.eigenvectors.column(k).into_owned())
}

fn sandwich(rho: &DensityMatrix, psi: &DVector<Complex64>) -> f64 {
    psi.dotc(&(rho.matrix() * psi)).re
}

/// `|⟨a|b⟩|²`.
pub fn pure_fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// `⟨ψ|ρ|ψ⟩`, the fidelity between a mixed state and a pure target.
pub fn mixed_pure_fidelity(rho: &DensityMatrix, target: &StateVector) -> Result<f64> {
    Ok(rho.expectation_pure(target)?.clamp(0.0, 1.0))
}

/// Spectral-norm distance between the circuit unitary and the reference
/// propagator with `substeps` substeps per interval.
pub fn trotter_error(policy: &ControlPolicy, substeps: usize) -> Result<f64> {
    trotter_error_with(policy, substeps, Interpolation::Hold)
}

pub fn trotter_error_with(
    policy: &ControlPolicy,
    substeps: usize,
    interpolation: Interpolation,
) -> Result<f64> {
    let circuit = circuit_unitary(&build_circuit(policy)?);
    let exact = exact_propagator_with(policy, substeps, interpolation)?;
    let xi = spectral_norm(&(circuit - exact));
    if !xi.is_finite() {
        return Err(Error::NonFinite("trotter error"));
    }
    Ok(xi)
}
