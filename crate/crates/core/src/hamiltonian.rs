//! Heisenberg-XY chain with an on-site longitudinal field.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::state::check_width;

/// Chain of `num_qubits` spins with uniform exchange `coupling` and per-site
/// field `field[n]` on qubit `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub num_qubits: usize,
    pub coupling: f64,
    pub field: Vec<f64>,
}

impl HamiltonianSpec {
    pub fn new(num_qubits: usize, coupling: f64, field: Vec<f64>) -> Result<Self> {
        let spec = Self {
            num_qubits,
            coupling,
            field,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Zero field everywhere.
    pub fn free(num_qubits: usize, coupling: f64) -> Result<Self> {
        Self::new(num_qubits, coupling, vec![0.0; num_qubits])
    }

    fn validate(&self) -> Result<()> {
        if self.num_qubits < 2 {
            return Err(Error::TooFewQubits {
                min: 2,
                found: self.num_qubits,
            });
        }
        check_width(self.num_qubits)?;
        if self.field.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                found: self.field.len(),
            });
        }
        if !self.coupling.is_finite() || self.field.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite("hamiltonian"));
        }
        Ok(())
    }
}

/// `H = −(J0/2) Σ_n (σˣ_n σˣ_{n+1} + σʸ_n σʸ_{n+1}) + Σ_n B_n σᶻ_n`.
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<CMatrix> {
    spec.validate()?;
    let mut h = exchange_term(spec.num_qubits, spec.coupling);
    add_field(&mut h, &spec.field, 1.0);
    Ok(h)
}

/// Exchange part only, `−(J0/2) Σ (XX + YY)`.
pub(crate) fn exchange_term(num_qubits: usize, coupling: f64) -> CMatrix {
    let dim = 1usize << num_qubits;
    let mut h = CMatrix::zeros(dim, dim);
    // (XX + YY) maps |..01..⟩ ↔ |..10..⟩ with weight 2 and kills |00⟩, |11⟩
    let hop = Complex64::new(-coupling, 0.0);
    for i in 0..dim {
        for n in 0..num_qubits - 1 {
            let pair = 0b11usize << n;
            let bits = (i & pair) >> n;
            if bits == 0b01 || bits == 0b10 {
                h[(i ^ pair, i)] += hop;
            }
        }
    }
    h
}

/// Adds `scale · Σ_n v[n] σᶻ_n` to the diagonal of `h`.
pub(crate) fn add_field(h: &mut CMatrix, values: &[f64], scale: f64) {
    for i in 0..h.nrows() {
        let mut diag = 0.0;
        for (n, &b) in values.iter().enumerate() {
            diag += if i >> n & 1 == 0 { b } else { -b };
        }
        h[(i, i)] += Complex64::new(scale * diag, 0.0);
    }
}
