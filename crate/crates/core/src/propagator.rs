//! Reference time-ordered propagator of the driven chain.
//!
//! Each Trotter interval `[t_j, t_j + Δt)` is split into `M` substeps. Within
//! a substep the Hamiltonian is frozen and exponentiated exactly through its
//! Hermitian eigendecomposition; substep propagators are composed with later
//! times on the left.
//!
//! The field inside an interval is either held at its knot value
//! ([`Interpolation::Hold`], the same piecewise-constant field the circuit
//! sees) or linearly interpolated towards the next knot
//! ([`Interpolation::Linear`]). With `Hold` the `M` substeps commute and the
//! interval reduces to a single exponential. With `Linear` each substep uses
//! the fourth-order Gauss-Legendre Magnus generator, still exponentiated
//! exactly.

use num_complex::Complex64;

use crate::ansatz::ControlPolicy;
use crate::error::{Error, Result};
use crate::hamiltonian::{add_field, exchange_term};
use crate::linalg::{expm_hermitian, identity, CMatrix};

pub const DEFAULT_SUBSTEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    Hold,
    Linear,
}

/// Time-ordered propagator over `N_t` intervals of length `Δt` with the
/// piecewise-constant field of the policy.
pub fn exact_propagator(policy: &ControlPolicy, substeps: usize) -> Result<CMatrix> {
    exact_propagator_with(policy, substeps, Interpolation::Hold)
}

pub fn exact_propagator_with(
    policy: &ControlPolicy,
    substeps: usize,
    interpolation: Interpolation,
) -> Result<CMatrix> {
    if substeps == 0 {
        return Err(Error::InvalidArgument("at least one substep required".into()));
    }
    if policy.params().iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("controller values"));
    }
    let setup = policy.setup();
    let n = setup.num_qubits;
    let dim = 1usize << n;
    let dt = setup.dt();
    let exchange = exchange_term(n, setup.coupling);

    let mut total = identity(dim);
    for j in 0..setup.trotter_steps {
        let interval = match interpolation {
            Interpolation::Hold => {
                // θ_{n,j} is the field integrated over the whole interval
                let mut g = &exchange * Complex64::new(dt, 0.0);
                add_field(&mut g, &policy.angles_for_step(j)?, 1.0);
                step_unitary(&g)
            }
            Interpolation::Linear => {
                let mut u = identity(dim);
                let h = 1.0 / substeps as f64;
                for m in 0..substeps {
                    let mid = j as f64 + (m as f64 + 0.5) * h;
                    let k1 = substep_generator(&exchange, policy, dt, h, mid - GL_OFFSET * h);
                    let k2 = substep_generator(&exchange, policy, dt, h, mid + GL_OFFSET * h);
                    // fourth-order Magnus: ½(K₁ + K₂) − i(√3/12)[K₂, K₁]
                    let comm = &k2 * &k1 - &k1 * &k2;
                    let g = (k1 + k2) * Complex64::new(0.5, 0.0) + comm * Complex64::new(0.0, -SQRT3 / 12.0);
                    u = step_unitary(&g) * u;
                }
                u
            }
        };
        if interval.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("propagator"));
        }
        total = interval * total;
    }
    Ok(total)
}

const SQRT3: f64 = 1.732_050_807_568_877_2;
/// Gauss-Legendre nodes sit at `½ ∓ √3/6` of a substep.
const GL_OFFSET: f64 = SQRT3 / 6.0;

/// `h·(Δt H_xy + Σ B_n(s) Z_n)` at fractional step position `s`.
fn substep_generator(exchange: &CMatrix, policy: &ControlPolicy, dt: f64, h: f64, s: f64) -> CMatrix {
    let mut g = exchange * Complex64::new(dt * h, 0.0);
    add_field(&mut g, &policy.interpolated_angles(s), h);
    g
}

/// `exp(−iG)`; an exactly vanishing generator yields the exact identity.
fn step_unitary(g: &CMatrix) -> CMatrix {
    if g.iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
        return identity(g.nrows());
    }
    expm_hermitian(g, 1.0)
}
