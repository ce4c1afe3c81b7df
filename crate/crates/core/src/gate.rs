//! The three gates of the Trotterized chain circuit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::StateVector;

/// A gate of the chain circuit.
///
/// `Rz` is `exp(-iθσᶻ)` and `Rxy` is `exp(-iα(σˣσˣ + σʸσʸ))` on the pair
/// `(qubit, qubit + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    X { qubit: usize },
    Rz { qubit: usize, theta: f64 },
    Rxy { qubit: usize, alpha: f64 },
}

impl Gate {
    pub fn x(qubit: usize) -> Self {
        Gate::X { qubit }
    }

    pub fn rz(qubit: usize, theta: f64) -> Self {
        Gate::Rz { qubit, theta }
    }

    /// Two-qubit exchange gate; only neighbouring pairs are allowed.
    pub fn rxy(first: usize, second: usize, alpha: f64) -> Result<Self> {
        if second != first + 1 {
            return Err(Error::NotNearestNeighbour { first, second });
        }
        Ok(Gate::Rxy { qubit: first, alpha })
    }

    /// Highest qubit index touched.
    pub fn max_qubit(&self) -> usize {
        match *self {
            Gate::X { qubit } | Gate::Rz { qubit, .. } => qubit,
            Gate::Rxy { qubit, .. } => qubit + 1,
        }
    }

    /// Local matrix: 2×2 for single-qubit gates, 4×4 for `Rxy` with the
    /// lower qubit as the least significant bit.
    pub fn local_matrix(&self) -> CMatrix {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match *self {
            Gate::X { .. } => CMatrix::from_row_slice(2, 2, &[z, one, one, z]),
            Gate::Rz { theta, .. } => CMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex64::from_polar(1.0, -theta),
                    z,
                    z,
                    Complex64::from_polar(1.0, theta),
                ],
            ),
            Gate::Rxy { alpha, .. } => {
                let c = Complex64::new((2.0 * alpha).cos(), 0.0);
                let s = Complex64::new(0.0, -(2.0 * alpha).sin());
                CMatrix::from_row_slice(4, 4, &[one, z, z, z, z, c, s, z, z, s, c, z, z, z, z, one])
            }
        }
    }

    /// Full `2^N × 2^N` matrix built from the Pauli exponential, independent
    /// of the in-place kernels in [`apply_in_place`].
    pub fn dense_matrix(&self, num_qubits: usize) -> Result<CMatrix> {
        self.check(num_qubits)?;
        let m = match *self {
            Gate::X { qubit } => linalg::embed(num_qubits, &[(qubit, &linalg::pauli_x())]),
            Gate::Rz { qubit, theta } => {
                let z = linalg::embed(num_qubits, &[(qubit, &linalg::pauli_z())]);
                linalg::expm_hermitian(&z, theta)
            }
            Gate::Rxy { qubit, alpha } => {
                let (x, y) = (linalg::pauli_x(), linalg::pauli_y());
                let xx = linalg::embed(num_qubits, &[(qubit, &x), (qubit + 1, &x)]);
                let yy = linalg::embed(num_qubits, &[(qubit, &y), (qubit + 1, &y)]);
                linalg::expm_hermitian(&(xx + yy), alpha)
            }
        };
        Ok(m)
    }

    pub(crate) fn check(&self, num_qubits: usize) -> Result<()> {
        let q = self.max_qubit();
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange { index: q, num_qubits });
        }
        match *self {
            Gate::Rz { theta: v, .. } | Gate::Rxy { alpha: v, .. } if !v.is_finite() => {
                Err(Error::NonFinite("gate angle"))
            }
            _ => Ok(()),
        }
    }
}

/// Returns `U_gate |ψ⟩`.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    gate.check(state.num_qubits())?;
    let mut out = state.clone();
    apply_in_place(out.amplitudes_mut(), gate);
    Ok(out)
}

/// Applies a gate to raw amplitudes. The caller guarantees the gate fits.
pub(crate) fn apply_in_place(amps: &mut [Complex64], gate: &Gate) {
    match *gate {
        Gate::X { qubit } => {
            let mask = 1usize << qubit;
            for i in 0..amps.len() {
                if i & mask == 0 {
                    amps.swap(i, i | mask);
                }
            }
        }
        Gate::Rz { qubit, theta } => {
            let mask = 1usize << qubit;
            let down = Complex64::from_polar(1.0, -theta);
            let up = down.conj();
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= if i & mask == 0 { down } else { up };
            }
        }
        Gate::Rxy { qubit, alpha } => {
            let lo = 1usize << qubit;
            let hi = lo << 1;
            let c = (2.0 * alpha).cos();
            let s = Complex64::new(0.0, -(2.0 * alpha).sin());
            for i in 0..amps.len() {
                // visit each |..01..⟩ once and pair it with |..10..⟩
                if i & lo != 0 && i & hi == 0 {
                    let j = (i ^ lo) | hi;
                    let (a, b) = (amps[i], amps[j]);
                    amps[i] = a * c + s * b;
                    amps[j] = s * a + b * c;
                }
            }
        }
    }
}
