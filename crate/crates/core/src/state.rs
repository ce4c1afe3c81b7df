//! Pure and mixed states of an N-qubit register.
//!
//! Basis ordering: bit `n` of a basis index is qubit `n`, and qubit `n` is
//! site `n + 1` of the chain. The single excitation on the first site is
//! therefore basis index `1`, and on the last site `1 << (N - 1)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register handled by the dense routines.
pub const MAX_DENSE_QUBITS: usize = 12;

pub(crate) const NORM_TOL: f64 = 1e-12;

/// Normalized statevector of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    /// Builds a state from raw amplitudes, checking length and norm.
    pub fn new(amplitudes: Vec<Complex64>, num_qubits: usize) -> Result<Self> {
        check_width(num_qubits)?;
        let dim = 1usize << num_qubits;
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("statevector"));
        }
        let norm = norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes,
            num_qubits,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>, num_qubits: usize) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized(n));
        }
        for a in &mut amplitudes {
            *a /= n;
        }
        Self::new(amplitudes, num_qubits)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_width(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            amplitudes,
            num_qubits,
        })
    }

    /// All spins down, `|00…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Single excitation on chain site `site` (1-based).
    pub fn excitation(num_qubits: usize, site: usize) -> Result<Self> {
        if site == 0 || site > num_qubits {
            return Err(Error::QubitOutOfRange {
                index: site.wrapping_sub(1),
                num_qubits,
            });
        }
        Self::basis(num_qubits, 1 << (site - 1))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn to_density(&self) -> DensityMatrix {
        let v = &self.amplitudes;
        let matrix = DMatrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj());
        DensityMatrix {
            matrix,
            num_qubits: self.num_qubits,
        }
    }
}

/// Total probability on basis states with exactly one excitation.
pub fn single_excitation_population(state: &StateVector) -> f64 {
    state
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(i, _)| i.count_ones() == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Density matrix of `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
    num_qubits: usize,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity.
    pub fn new(matrix: DMatrix<Complex64>, num_qubits: usize) -> Result<Self> {
        check_width(num_qubits)?;
        let dim = 1usize << num_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        if matrix.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("density matrix"));
        }
        if hermiticity_defect(&matrix) > 1e-12 {
            return Err(Error::InvalidArgument("density matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("trace {tr} differs from 1")));
        }
        let min_eig = crate::linalg::hermitian_eigenvalues(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(Error::NotPositiveSemidefinite(min_eig));
        }
        Ok(Self { matrix, num_qubits })
    }

    /// `I / 2^N`.
    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_width(num_qubits)?;
        let dim = 1usize << num_qubits;
        let matrix = DMatrix::from_diagonal_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0));
        Ok(Self { matrix, num_qubits })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        // Tr[ρ²] = Σ_ij |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation_pure(&self, state: &StateVector) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        let v = state.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..v.len() {
            if v[j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = self.matrix.column(j);
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..v.len() {
                s += v[i].conj() * col[i];
            }
            acc += s * v[j];
        }
        Ok(acc.re)
    }

    /// Largest elementwise deviation from hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }
}

pub(crate) fn check_width(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::TooFewQubits {
            min: 1,
            found: num_qubits,
        });
    }
    if num_qubits > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            max: MAX_DENSE_QUBITS,
            found: num_qubits,
        });
    }
    Ok(())
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
