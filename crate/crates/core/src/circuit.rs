//! Gate sequences and their execution on statevectors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::{apply_in_place, Gate};
use crate::linalg::CMatrix;
use crate::state::{check_width, StateVector};

/// Ordered gate list. Sequences produced by the ansatz consist of
/// `trotter_steps` layers, each `N` `Rz` gates followed by `N − 1` `Rxy`
/// gates on pairs `(0,1), (1,2), …` in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSequence {
    gates: Vec<Gate>,
    num_qubits: usize,
    trotter_steps: usize,
    dt: f64,
}

impl GateSequence {
    /// Sequence with no gates.
    pub fn empty(num_qubits: usize) -> Result<Self> {
        check_width(num_qubits)?;
        Ok(Self {
            gates: Vec::new(),
            num_qubits,
            trotter_steps: 0,
            dt: 0.0,
        })
    }

    /// Arbitrary gate list; not treated as layered.
    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        check_width(num_qubits)?;
        for g in &gates {
            g.check(num_qubits)?;
        }
        Ok(Self {
            gates,
            num_qubits,
            trotter_steps: 0,
            dt: 0.0,
        })
    }

    /// Trotterized sequence: one `Rz` layer with `rz_angles[j]` followed by an
    /// `Rxy(alpha)` layer, for every step `j`.
    pub fn trotterized(num_qubits: usize, dt: f64, rz_angles: &[Vec<f64>], alpha: f64) -> Result<Self> {
        check_width(num_qubits)?;
        let per_layer = 2 * num_qubits - 1;
        let mut gates = Vec::with_capacity(rz_angles.len() * per_layer);
        for angles in rz_angles {
            if angles.len() != num_qubits {
                return Err(Error::DimensionMismatch {
                    expected: num_qubits,
                    found: angles.len(),
                });
            }
            gates.extend(angles.iter().enumerate().map(|(n, &theta)| Gate::rz(n, theta)));
            gates.extend((0..num_qubits - 1).map(|n| Gate::Rxy { qubit: n, alpha }));
        }
        for g in &gates {
            g.check(num_qubits)?;
        }
        Ok(Self {
            gates,
            num_qubits,
            trotter_steps: rz_angles.len(),
            dt,
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn trotter_steps(&self) -> usize {
        self.trotter_steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gates of Trotter layer `j` (`Rz` layer then `Rxy` layer).
    pub fn layer(&self, j: usize) -> Result<&[Gate]> {
        if j >= self.trotter_steps {
            return Err(Error::StepOutOfRange {
                step: j,
                steps: self.trotter_steps,
            });
        }
        let per_layer = 2 * self.num_qubits - 1;
        Ok(&self.gates[j * per_layer..(j + 1) * per_layer])
    }

    /// Iterates over Trotter layers; a non-layered sequence yields its gate
    /// list as a single block.
    pub fn layers(&self) -> impl Iterator<Item = &[Gate]> {
        let size = if self.trotter_steps == 0 {
            self.gates.len().max(1)
        } else {
            2 * self.num_qubits - 1
        };
        self.gates.chunks(size)
    }
}

/// Applies every gate of `seq` in order to `initial`.
pub fn run_circuit(seq: &GateSequence, initial: &StateVector) -> Result<StateVector> {
    if seq.num_qubits() != initial.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: seq.num_qubits(),
            found: initial.num_qubits(),
        });
    }
    let mut out = initial.clone();
    run_in_place(seq.gates(), out.amplitudes_mut());
    Ok(out)
}

pub(crate) fn run_in_place(gates: &[Gate], amps: &mut [Complex64]) {
    for g in gates {
        apply_in_place(amps, g);
    }
}

/// Dense unitary of the whole sequence, column by column.
pub fn circuit_unitary(seq: &GateSequence) -> CMatrix {
    let dim = 1usize << seq.num_qubits();
    let mut u = CMatrix::zeros(dim, dim);
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    for j in 0..dim {
        col.fill(Complex64::new(0.0, 0.0));
        col[j] = Complex64::new(1.0, 0.0);
        run_in_place(seq.gates(), &mut col);
        u.set_column(j, &nalgebra::DVector::from_column_slice(&col));
    }
    u
}
