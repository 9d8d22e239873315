//! Dense complex linear algebra and the quantum primitives everything else
//! is built on: state vectors, density operators, Pauli strings, the Bell
//! basis, tensor products and partial traces.
//!
//! Registers use a fixed computational-basis ordering in which the leftmost
//! tensor factor is the most significant bit. For an extended register the
//! primary qubits come first, followed by the ancillas.

mod pauli;
mod state;

pub use pauli::{pauli_matrix, Pauli, PauliString};
pub use state::{bell_basis, DensityOperator, StateVector};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{DcqdError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermiticity and normalization tolerance for states.
pub const STATE_TOL: f64 = 1e-12;
/// Eigenvalue floor for positive semidefiniteness checks.
pub const PSD_FLOOR: f64 = -1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn tensor_all<'a>(factors: impl IntoIterator<Item = &'a CMatrix>) -> CMatrix {
    factors
        .into_iter()
        .fold(identity(1), |acc, f| acc.kronecker(f))
}

pub fn hadamard() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
}

/// Single-qubit phase gate diag(1, i).
pub fn phase_gate() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, I])
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the Hermitian
/// part of `m` is used.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()).scale(0.5);
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Eigen-decomposition of the Hermitian part of `m`, returned as
/// (eigenvalue, eigenvector) pairs in descending eigenvalue order.
pub fn hermitian_eigen(m: &CMatrix) -> Vec<(f64, CVector)> {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut pairs: Vec<(f64, CVector)> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&v, col)| (v, col.into_owned()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

/// Numerical rank from singular values, relative to the largest one.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let max = sv.first().copied().unwrap_or(0.0);
    sv.iter().filter(|&&s| s > rel_tol * max.max(f64::MIN_POSITIVE)).count()
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// `Tr(O ρ)`.
pub fn expectation(rho: &DensityOperator, observable: &CMatrix) -> Result<Complex64> {
    let m = rho.matrix();
    if observable.nrows() != m.nrows() || observable.ncols() != m.ncols() {
        return Err(DcqdError::DimensionMismatch(format!(
            "observable is {}x{}, state is {}x{}",
            observable.nrows(),
            observable.ncols(),
            m.nrows(),
            m.ncols()
        )));
    }
    // Tr(OA) = sum_ij O_ij A_ji without forming the product.
    let mut acc = ZERO;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            acc += observable[(i, j)] * m[(j, i)];
        }
    }
    Ok(acc)
}

/// Reduced density operator on the subsystems listed in `keep`.
///
/// `dims` gives the dimension of each tensor factor, leftmost first. The
/// kept factors appear in the output in ascending index order.
pub fn partial_trace(rho: &DensityOperator, keep: &[usize], dims: &[usize]) -> Result<DensityOperator> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || total != rho.dim() {
        return Err(DcqdError::DimensionMismatch(format!(
            "factor dims {dims:?} do not multiply to {}",
            rho.dim()
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(DcqdError::DimensionMismatch(format!(
            "subsystem {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    let kept_dim: usize = kept.iter().map(|&i| dims[i]).product();
    let traced_dim: usize = traced.iter().map(|&i| dims[i]).product();

    // Row-major strides of the full register.
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offset = |subsystems: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for &s in subsystems.iter().rev() {
            off += (idx % dims[s]) * strides[s];
            idx /= dims[s];
        }
        off
    };

    let m = rho.matrix();
    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for a in 0..kept_dim {
        let oa = offset(&kept, a);
        for b in 0..kept_dim {
            let ob = offset(&kept, b);
            let mut acc = ZERO;
            for t in 0..traced_dim {
                let ot = offset(&traced, t);
                acc += m[(oa + ot, ob + ot)];
            }
            out[(a, b)] = acc;
        }
    }
    DensityOperator::new_subnormalized(out)
}

/// Reorders the qubits of a state vector: qubit `i` of the result is qubit
/// `order[i]` of the input.
pub fn permute_qubits(v: &CVector, order: &[usize]) -> CVector {
    let n = order.len();
    assert_eq!(v.len(), 1 << n, "vector length must be 2^{n}");
    let mut out = CVector::zeros(v.len());
    for new_idx in 0..v.len() {
        let mut old_idx = 0usize;
        for (i, &src) in order.iter().enumerate() {
            let bit = (new_idx >> (n - 1 - i)) & 1;
            old_idx |= bit << (n - 1 - src);
        }
        out[new_idx] = v[old_idx];
    }
    out
}

/// Qubit order that maps interleaved pairs `(A1 B1 A2 B2 ...)` into the
/// block layout `(A1 .. An B1 .. Bn)`.
pub fn pairs_to_blocks(n_pairs: usize) -> Vec<usize> {
    (0..n_pairs)
        .map(|j| 2 * j)
        .chain((0..n_pairs).map(|j| 2 * j + 1))
        .collect()
}
