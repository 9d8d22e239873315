use num_complex::Complex64;

use super::{hermitian_eigenvalues, hermiticity_deviation, is_finite, trace, CMatrix, CVector, PSD_FLOOR, STATE_TOL};
use crate::error::{DcqdError, Result};

/// Normalized pure state on a register of dimension `2^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(DcqdError::InvalidState(format!("dimension {dim} is not a power of two")));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(DcqdError::InvalidState("non-finite amplitude".into()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(DcqdError::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(DcqdError::InvalidState(format!("basis index {index} >= {dim}")));
        }
        let mut v = CVector::zeros(dim);
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    /// Applies a unitary. Fails if the result is not normalized.
    pub fn evolve(&self, unitary: &CMatrix) -> Result<StateVector> {
        if unitary.ncols() != self.dim() {
            return Err(DcqdError::DimensionMismatch(format!(
                "operator has {} columns, state has dimension {}",
                unitary.ncols(),
                self.dim()
            )));
        }
        StateVector::new(unitary * &self.amplitudes)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            subnormalized: false,
        }
    }
}

/// Hermitian, positive semidefinite operator with unit trace, or with trace
/// below one when produced by a trace-decreasing map (flagged).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    subnormalized: bool,
}

impl DensityOperator {
    /// Validates a unit-trace density matrix.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let rho = Self::new_subnormalized(matrix)?;
        if rho.subnormalized {
            return Err(DcqdError::InvalidState(format!(
                "trace {} differs from 1",
                rho.trace()
            )));
        }
        Ok(rho)
    }

    /// Validates a density matrix whose trace may lie in `[0, 1]`.
    pub fn new_subnormalized(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(DcqdError::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !is_finite(&matrix) {
            return Err(DcqdError::InvalidState("non-finite entry".into()));
        }
        let herm = hermiticity_deviation(&matrix);
        if herm > STATE_TOL {
            return Err(DcqdError::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = trace(&matrix).re;
        if !(-STATE_TOL..=1.0 + STATE_TOL).contains(&tr) {
            return Err(DcqdError::InvalidState(format!("trace {tr} outside [0, 1]")));
        }
        let min_eig = hermitian_eigenvalues(&matrix).first().copied().unwrap_or(0.0);
        if min_eig < PSD_FLOOR {
            return Err(DcqdError::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        let subnormalized = tr < 1.0 - STATE_TOL;
        Ok(Self { matrix, subnormalized })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    pub fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            matrix: self.matrix.kronecker(&other.matrix),
            subnormalized: self.subnormalized || other.subnormalized,
        }
    }
}

/// Bell basis in the order (φ⁺, ψ⁺, ψ⁻, φ⁻). Entry `m` is the state reached
/// from φ⁺ by the Pauli error with index `m` on the first qubit, up to phase.
pub fn bell_basis() -> [StateVector; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(s, 0.0);
    let make = |v: [Complex64; 4]| StateVector {
        amplitudes: CVector::from_row_slice(&v),
    };
    // Amplitude order |00>, |01>, |10>, |11>.
    [
        make([p, z, z, p]),
        make([z, p, p, z]),
        make([z, -p, p, z]),
        make([p, z, z, -p]),
    ]
}
