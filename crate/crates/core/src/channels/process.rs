use serde::{Deserialize, Serialize};

use super::kraus::KrausSet;
use crate::error::{DcqdError, Result};
use crate::qcore::{
    hermitian_eigen, hermitian_eigenvalues, hermiticity_deviation, identity, is_finite, max_abs_diff, trace,
    CMatrix, PauliString, ZERO,
};

/// Eigenvalue floor below which χ is rejected as not completely positive.
pub const CHI_PSD_FLOOR: f64 = -1e-9;
/// Hermiticity and trace tolerance for χ.
pub const CHI_TOL: f64 = 1e-10;
/// Eigenvalues of χ below this are dropped when extracting Kraus operators.
pub const KRAUS_CUTOFF: f64 = 1e-12;

/// Process matrix χ relative to the Pauli-string basis, rows and columns in
/// lexicographic Pauli order (I, X, Y, Z per qubit):
/// `E(ρ) = Σ_mn χ_mn E_m ρ E_n†`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    n: usize,
    chi: CMatrix,
}

impl ProcessMatrix {
    /// Wraps a `4^n × 4^n` matrix. Only shape and finiteness are enforced;
    /// physical constraints are checked by [`validate`].
    pub fn new(n: usize, chi: CMatrix) -> Result<Self> {
        let size = 1usize << (2 * n);
        if n == 0 || chi.nrows() != size || chi.ncols() != size {
            return Err(DcqdError::DimensionMismatch(format!(
                "χ for {n} qubits must be {size}x{size}, got {}x{}",
                chi.nrows(),
                chi.ncols()
            )));
        }
        if !is_finite(&chi) {
            return Err(DcqdError::InvalidChannel("χ has non-finite entries".into()));
        }
        Ok(Self { n, chi })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.chi.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.chi
    }

    pub fn into_matrix(self) -> CMatrix {
        self.chi
    }

    /// Quantum dynamical population χ_mm.
    pub fn populations(&self) -> Vec<f64> {
        self.chi.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        PauliString::all(self.n).map(|p| p.label()).collect()
    }

    /// Evaluates `Σ χ_mn E_m X E_n†`.
    pub fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        let basis: Vec<CMatrix> = PauliString::all(self.n).map(|p| p.matrix()).collect();
        let d = 1usize << self.n;
        let mut out = CMatrix::zeros(d, d);
        for (m, em) in basis.iter().enumerate() {
            let left = em * x;
            for (k, ek) in basis.iter().enumerate() {
                let coeff = self.chi[(m, k)];
                if coeff != ZERO {
                    out += &left * ek.adjoint() * coeff;
                }
            }
        }
        out
    }
}

/// Expands each Kraus operator in the Pauli basis,
/// `c_im = Tr(E_m† K_i) / 2^n`, and sums `χ_mn = Σ_i c_im conj(c_in)`.
pub fn chi_from_kraus(kraus: &KrausSet) -> ProcessMatrix {
    let n = kraus.n_qubits();
    let d = kraus.dim() as f64;
    let basis: Vec<CMatrix> = PauliString::all(n).map(|p| p.matrix()).collect();
    let size = basis.len();
    let mut chi = CMatrix::zeros(size, size);
    for k in kraus.operators() {
        let coeffs: Vec<_> = basis
            .iter()
            .map(|e| trace(&(e.adjoint() * k)) / d)
            .collect();
        for m in 0..size {
            for j in 0..size {
                chi[(m, j)] += coeffs[m] * coeffs[j].conj();
            }
        }
    }
    ProcessMatrix { n, chi }
}

/// Kraus operators from the eigen-decomposition of χ,
/// `K_j = sqrt(λ_j) Σ_m v_j[m] E_m`.
pub fn kraus_from_chi(chi: &ProcessMatrix) -> Result<KrausSet> {
    let eig = hermitian_eigen(chi.matrix());
    let min = eig.last().map(|p| p.0).unwrap_or(0.0);
    if min < CHI_PSD_FLOOR {
        return Err(DcqdError::NotCompletelyPositive { min_eigenvalue: min });
    }
    let basis: Vec<CMatrix> = PauliString::all(chi.n).map(|p| p.matrix()).collect();
    let d = 1usize << chi.n;
    let operators: Vec<CMatrix> = eig
        .iter()
        .filter(|(lambda, _)| *lambda > KRAUS_CUTOFF)
        .map(|(lambda, v)| {
            let scale = lambda.sqrt();
            basis
                .iter()
                .zip(v.iter())
                .fold(CMatrix::zeros(d, d), |acc, (e, &coef)| acc + e * (coef * scale))
        })
        .collect();
    if operators.is_empty() {
        // The zero map.
        return KrausSet::new(chi.n, vec![CMatrix::zeros(d, d)]);
    }
    KrausSet::new(chi.n, operators)
}

/// Outcome of the physical-validity checks on a process matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub hermiticity_deviation: f64,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// Largest entry of `Σ χ_mn E_n†E_m − I`; present when trace
    /// preservation was requested.
    pub tp_residual: Option<f64>,
    pub hermitian: bool,
    pub positive: bool,
    pub trace_bounded: bool,
    pub trace_preserving: Option<bool>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.hermitian && self.positive && self.trace_bounded && self.trace_preserving.unwrap_or(true)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.hermitian {
            out.push(format!("hermiticity deviation {:e}", self.hermiticity_deviation));
        }
        if !self.positive {
            out.push(format!("minimum eigenvalue {:e}", self.min_eigenvalue));
        }
        if !self.trace_bounded {
            out.push(format!("trace {}", self.trace));
        }
        if self.trace_preserving == Some(false) {
            out.push(format!("trace-preservation residual {:e}", self.tp_residual.unwrap_or(f64::NAN)));
        }
        out
    }
}

/// Reports Hermiticity, positivity, `Tr χ ≤ 1` and optionally the
/// trace-preservation condition `Σ χ_mn E_n†E_m = I`. Never fails.
pub fn validate(chi: &ProcessMatrix, trace_preserving: bool) -> ValidationReport {
    let herm = hermiticity_deviation(chi.matrix());
    let min_eig = hermitian_eigenvalues(chi.matrix()).first().copied().unwrap_or(0.0);
    let tr = trace(chi.matrix()).re;
    let tp_residual = trace_preserving.then(|| {
        let basis: Vec<CMatrix> = PauliString::all(chi.n).map(|p| p.matrix()).collect();
        let d = 1usize << chi.n;
        let mut acc = CMatrix::zeros(d, d);
        for (m, em) in basis.iter().enumerate() {
            for (k, ek) in basis.iter().enumerate() {
                acc += ek.adjoint() * em * chi.matrix()[(m, k)];
            }
        }
        max_abs_diff(&acc, &identity(d))
    });
    ValidationReport {
        hermiticity_deviation: herm,
        min_eigenvalue: min_eig,
        trace: tr,
        tp_residual,
        hermitian: herm <= CHI_TOL,
        positive: min_eig >= CHI_PSD_FLOOR,
        trace_bounded: tr <= 1.0 + CHI_TOL,
        trace_preserving: tp_residual.map(|r| r <= CHI_TOL),
    }
}

/// Linear map from χ (flattened row-major, `4^n · 4^n` complex entries) to
/// the entries of `Σ χ_mn E_n†E_m` (flattened row-major, `4^n` entries).
/// Its rank counts the independent trace-preservation constraints.
pub fn tp_constraint_matrix(n: usize) -> CMatrix {
    let basis: Vec<CMatrix> = PauliString::all(n).map(|p| p.matrix()).collect();
    let size = basis.len();
    let d = 1usize << n;
    let mut a = CMatrix::zeros(d * d, size * size);
    for (m, em) in basis.iter().enumerate() {
        for (k, ek) in basis.iter().enumerate() {
            let prod = ek.adjoint() * em;
            for r in 0..d {
                for col in 0..d {
                    a[(r * d + col, m * size + k)] = prod[(r, col)];
                }
            }
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::kraus::action_distance;
    use crate::qcore::{c, rank, singular_values, ONE};
    use approx::assert_relative_eq;

    /// Direct evaluation of `Σ χ_mn E_m X E_n†`, written independently of
    /// the library helpers.
    fn chi_action(chi: &CMatrix, n: usize, x: &CMatrix) -> CMatrix {
        let ps: Vec<CMatrix> = PauliString::all(n).map(|p| p.matrix()).collect();
        let mut out = CMatrix::zeros(x.nrows(), x.ncols());
        for i in 0..ps.len() {
            for j in 0..ps.len() {
                out += &ps[i] * x * ps[j].adjoint() * chi[(i, j)];
            }
        }
        out
    }

    fn oracle_matches(kraus: &KrausSet, chi: &CMatrix) -> f64 {
        PauliString::all(kraus.n_qubits())
            .map(|p| {
                let x = p.matrix();
                max_abs_diff(&kraus.apply_operator(&x), &chi_action(chi, kraus.n_qubits(), &x))
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identity_channel_chi() {
        let chi = chi_from_kraus(&KrausSet::identity(1));
        let mut expect = CMatrix::zeros(4, 4);
        expect[(0, 0)] = ONE;
        assert_eq!(chi.matrix(), &expect);
    }

    #[test]
    fn bit_flip_chi_against_oracle() {
        let chan = KrausSet::bit_flip(0.25).unwrap();
        // Frozen expectation, confirmed by the action oracle below.
        let expect = CMatrix::from_diagonal(&crate::qcore::CVector::from_vec(vec![
            c(0.75, 0.0),
            c(0.25, 0.0),
            ZERO,
            ZERO,
        ]));
        assert!(oracle_matches(&chan, &expect) < 1e-15);
        assert!(max_abs_diff(chi_from_kraus(&chan).matrix(), &expect) < 1e-15);
    }

    #[test]
    fn full_amplitude_damping_chi_against_oracle() {
        let chan = KrausSet::amplitude_damping(1.0).unwrap();
        let q = 0.25;
        let mut expect = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3), (1, 1), (2, 2)] {
            expect[(i, j)] = c(q, 0.0);
        }
        expect[(1, 2)] = c(0.0, -q);
        expect[(2, 1)] = c(0.0, q);
        assert!(oracle_matches(&chan, &expect) < 1e-15);
        assert!(max_abs_diff(chi_from_kraus(&chan).matrix(), &expect) < 1e-15);
    }

    #[test]
    fn process_matrix_action_matches_kraus() {
        let chan = KrausSet::amplitude_damping(0.3).unwrap();
        let chi = chi_from_kraus(&chan);
        for p in PauliString::all(1) {
            let x = p.matrix();
            assert!(max_abs_diff(&chi.apply_operator(&x), &chan.apply_operator(&x)) < 1e-15);
        }
    }

    #[test]
    fn kraus_from_diagonal_chi() {
        let id = kraus_from_chi(&chi_from_kraus(&KrausSet::identity(1))).unwrap();
        assert_eq!(id.len(), 1);
        assert!(action_distance(&id, &KrausSet::identity(1)).unwrap() < 1e-15);

        let chi = ProcessMatrix::new(
            1,
            CMatrix::from_diagonal(&crate::qcore::CVector::from_vec(vec![
                c(0.75, 0.0),
                c(0.25, 0.0),
                ZERO,
                ZERO,
            ])),
        )
        .unwrap();
        let k = kraus_from_chi(&chi).unwrap();
        assert_eq!(k.len(), 2);
        assert!(action_distance(&k, &KrausSet::bit_flip(0.25).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn kraus_from_chi_rejects_negative() {
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(-0.1, 0.0);
        let err = kraus_from_chi(&ProcessMatrix::new(1, m).unwrap()).unwrap_err();
        assert!(matches!(err, DcqdError::NotCompletelyPositive { .. }));
    }

    #[test]
    fn validation_flags() {
        let good = chi_from_kraus(&KrausSet::depolarizing(0.2).unwrap());
        let report = validate(&good, true);
        assert!(report.passes(), "{:?}", report);
        assert!(report.tp_residual.unwrap() < 1e-15);

        let big = ProcessMatrix::new(1, identity(4).scale(1.5 / 4.0)).unwrap();
        let report = validate(&big, false);
        assert!(!report.trace_bounded);
        assert!(report.hermitian && report.positive);

        let mut m = good.matrix().clone();
        m[(0, 1)] = c(0.1, 0.0);
        let report = validate(&ProcessMatrix::new(1, m).unwrap(), false);
        assert!(!report.hermitian);
        assert_eq!(report.violations().len(), 1);
    }

    #[test]
    fn unitary_chi_is_rank_one() {
        let chi = chi_from_kraus(&KrausSet::rotation([0.3, -0.2, 0.9], 1.1).unwrap());
        let eig = hermitian_eigenvalues(chi.matrix());
        assert_relative_eq!(eig[3], 1.0, epsilon = 1e-14);
        assert!(eig[2].abs() < 1e-10);
    }

    #[test]
    fn single_qubit_tp_constraints_have_rank_four() {
        let a = tp_constraint_matrix(1);
        assert_eq!(rank(&a, 1e-10), 4);
        // 16 real parameters, 4 removed by trace preservation.
        assert_eq!(16 - rank(&a, 1e-10), 12);
        assert_eq!(singular_values(&a).len(), 4);
    }

    #[test]
    fn rejects_wrong_shape() {
        assert!(ProcessMatrix::new(1, identity(3)).is_err());
        assert!(ProcessMatrix::new(2, identity(4)).is_err());
    }
}
