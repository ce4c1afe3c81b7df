//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Below this dimension the spectral norm comes from a full SVD.
const SVD_CUTOFF: usize = 256;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Applies `f` to the spectrum of a Hermitian matrix: `V f(Λ) V†`.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> Complex64) -> CMatrix {
    let eig = m.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let n = m.nrows();
    let mut scaled = v.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let fl = f(lambda);
        for i in 0..n {
            scaled[(i, j)] *= fl;
        }
    }
    scaled * v.adjoint()
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    hermitian_function(h, |lambda| Complex64::from_polar(1.0, -lambda * t))
}

/// Square root of a positive semidefinite matrix. Small negative
/// eigenvalues from round-off are clamped to zero.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    hermitian_function(m, |lambda| Complex64::new(lambda.max(0.0).sqrt(), 0.0))
}

/// Largest singular value.
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.nrows() < SVD_CUTOFF && a.ncols() < SVD_CUTOFF {
        return a
            .clone()
            .singular_values()
            .iter()
            .fold(0.0f64, |acc, &s| acc.max(s));
    }
    power_iteration_norm(a, 1e-10, 10_000)
}

/// Power iteration on `A†A`, stopping when the Rayleigh quotient changes
/// by less than `tol` relative.
pub fn power_iteration_norm(a: &CMatrix, tol: f64, max_iter: usize) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    // Deterministic start vector with no special alignment.
    let mut v = DVector::from_fn(n, |i, _| {
        Complex64::new(1.0 + 0.37 * (i as f64).sin(), 0.21 * (i as f64 * 1.3).cos())
    });
    let ah = a.adjoint();
    let mut prev = 0.0;
    for _ in 0..max_iter {
        let nv = v.norm();
        if nv == 0.0 {
            return 0.0;
        }
        v /= Complex64::new(nv, 0.0);
        let w = &ah * (a * &v);
        let lambda = v.dotc(&w).re;
        v = w;
        if (lambda - prev).abs() <= tol * lambda.abs().max(f64::MIN_POSITIVE) {
            return lambda.max(0.0).sqrt();
        }
        prev = lambda;
    }
    prev.max(0.0).sqrt()
}

/// `max |(U†U − I)_ij|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let p = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..p.nrows() {
        for j in 0..p.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((p[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    CMatrix::from_row_slice(2, 2, &[ZERO, -i, i, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

/// Tensor product of single-qubit operators on the listed qubits, identity
/// elsewhere. Qubit `n` is bit `n` of the basis index.
pub fn embed(num_qubits: usize, ops: &[(usize, &CMatrix)]) -> CMatrix {
    let mut full = identity(1);
    // kron with the highest qubit leftmost so that bit n ↔ qubit n
    for q in (0..num_qubits).rev() {
        let factor = ops
            .iter()
            .find(|(idx, _)| *idx == q)
            .map(|(_, m)| (*m).clone())
            .unwrap_or_else(|| identity(2));
        full = kron(&full, &factor);
    }
    full
}
