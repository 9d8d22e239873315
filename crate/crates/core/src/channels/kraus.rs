use crate::error::{DcqdError, Result};
use crate::qcore::{
    c, hermitian_eigenvalues, identity, is_finite, max_abs_diff, CMatrix, CVector, DensityOperator,
    PauliString, ONE, ZERO,
};

/// Tolerance for `Σ K†K ⪯ I` and for the trace-preserving flag.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Operator-sum description of a map on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    n: usize,
    operators: Vec<CMatrix>,
}

impl KrausSet {
    /// Builds a Kraus set, checking shapes and that the map does not
    /// increase trace.
    pub fn new(n: usize, operators: Vec<CMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(DcqdError::InvalidChannel("qubit count must be positive".into()));
        }
        if operators.is_empty() {
            return Err(DcqdError::InvalidChannel("no Kraus operators".into()));
        }
        let d = 1usize << n;
        for (i, k) in operators.iter().enumerate() {
            if k.nrows() != d || k.ncols() != d {
                return Err(DcqdError::DimensionMismatch(format!(
                    "Kraus operator {i} is {}x{}, expected {d}x{d}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            if !is_finite(k) {
                return Err(DcqdError::InvalidChannel(format!("Kraus operator {i} has non-finite entries")));
            }
        }
        let set = Self { n, operators };
        let max_eig = hermitian_eigenvalues(&set.completeness()).last().copied().unwrap_or(0.0);
        if max_eig > 1.0 + COMPLETENESS_TOL {
            return Err(DcqdError::InvalidChannel(format!(
                "map increases trace: largest eigenvalue of ΣK†K is {max_eig}"
            )));
        }
        Ok(set)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            operators: vec![identity(1 << n)],
        }
    }

    /// Single unitary conjugation. The operator is not checked for unitarity
    /// beyond the trace condition of [`KrausSet::new`].
    pub fn unitary(u: CMatrix) -> Result<Self> {
        let d = u.nrows();
        if d == 0 || !d.is_power_of_two() {
            return Err(DcqdError::DimensionMismatch(format!("unitary dimension {d} is not 2^n")));
        }
        Self::new(d.trailing_zeros() as usize, vec![u])
    }

    /// `exp(-i θ n̂·σ / 2)` for a single qubit. The axis is normalized.
    pub fn rotation(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(norm > 0.0) || !angle.is_finite() {
            return Err(DcqdError::InvalidChannel("rotation needs a nonzero axis and finite angle".into()));
        }
        let (s, co) = (angle / 2.0).sin_cos();
        let [x, y, z] = axis.map(|a| a / norm);
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[c(co, -s * z), c(-s * y, -s * x), c(s * y, -s * x), c(co, s * z)],
        );
        Self::unitary(u)
    }

    /// `ρ → (1-p) ρ + p PρP` for a single-qubit Pauli `P`.
    pub fn pauli_flip(pauli: usize, p: f64) -> Result<Self> {
        check_probability("p", p)?;
        let letter = PauliString::from_indices(&[pauli as u8])?;
        Self::new(
            1,
            vec![identity(2).scale((1.0 - p).sqrt()), letter.matrix().scale(p.sqrt())],
        )
    }

    pub fn bit_flip(p: f64) -> Result<Self> {
        Self::pauli_flip(1, p)
    }

    pub fn phase_flip(p: f64) -> Result<Self> {
        Self::pauli_flip(3, p)
    }

    /// `ρ → (1-p) ρ + p I/2`.
    pub fn depolarizing(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        let mut ops = vec![identity(2).scale((1.0 - 3.0 * p / 4.0).sqrt())];
        for q in 1..=3u8 {
            ops.push(PauliString::from_indices(&[q])?.matrix().scale((p / 4.0).sqrt()));
        }
        Self::new(1, ops)
    }

    /// Amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: f64) -> Result<Self> {
        check_probability("gamma", gamma)?;
        let k0 = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c((1.0 - gamma).sqrt(), 0.0)]);
        let k1 = CMatrix::from_row_slice(2, 2, &[ZERO, c(gamma.sqrt(), 0.0), ZERO, ZERO]);
        Self::new(1, vec![k0, k1])
    }

    /// Amplitude damping for duration `t` with relaxation time `t1`,
    /// `gamma = 1 - exp(-t/T1)`.
    pub fn amplitude_damping_timed(t: f64, t1: f64) -> Result<Self> {
        check_duration(t, t1, "T1")?;
        Self::amplitude_damping(1.0 - (-t / t1).exp())
    }

    /// Phase damping that multiplies the off-diagonal elements by
    /// `sqrt(1 - lambda)`.
    pub fn phase_damping(lambda: f64) -> Result<Self> {
        check_probability("lambda", lambda)?;
        let k0 = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, c((1.0 - lambda).sqrt(), 0.0)]);
        let k1 = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, c(lambda.sqrt(), 0.0)]);
        Self::new(1, vec![k0, k1])
    }

    /// Phase damping for duration `t`: off-diagonal factor `exp(-t/(2 T2))`.
    pub fn phase_damping_timed(t: f64, t2: f64) -> Result<Self> {
        check_duration(t, t2, "T2")?;
        Self::phase_damping(1.0 - (-t / t2).exp())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `Σ K†K`.
    pub fn completeness(&self) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(self.dim(), self.dim()), |acc, k| acc + k.adjoint() * k)
    }

    pub fn is_trace_preserving(&self) -> bool {
        max_abs_diff(&self.completeness(), &identity(self.dim())) <= COMPLETENESS_TOL
    }

    /// `Σ K X K†` for an arbitrary operator on the channel's own qubits.
    pub fn apply_operator(&self, x: &CMatrix) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(self.dim(), self.dim()), |acc, k| acc + k * x * k.adjoint())
    }

    /// Applies the map to the leading `n` qubits of a register, identity on
    /// the remaining (ancilla) qubits.
    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        let rest = self.ancilla_dim(rho.dim())?;
        let mut out = CMatrix::zeros(rho.dim(), rho.dim());
        for k in &self.operators {
            let big = k.kronecker(&identity(rest));
            out += &big * rho.matrix() * big.adjoint();
        }
        let out = (&out + out.adjoint()).scale(0.5);
        DensityOperator::new_subnormalized(out)
    }

    /// Unnormalized branch vectors `(K_i ⊗ I)|ψ⟩` for a pure register state.
    pub fn branches(&self, psi: &CVector) -> Result<Vec<CVector>> {
        let rest = self.ancilla_dim(psi.len())?;
        // Row-major reshape: amplitude index = a * rest + b.
        let as_matrix = CMatrix::from_row_slice(self.dim(), rest, psi.as_slice());
        Ok(self
            .operators
            .iter()
            .map(|k| {
                let out = k * &as_matrix;
                CVector::from_row_slice(out.transpose().as_slice())
            })
            .collect())
    }

    /// Kraus set of `self ⊗ other` (self on the leading qubits).
    pub fn tensor(&self, other: &KrausSet) -> KrausSet {
        let operators = self
            .operators
            .iter()
            .flat_map(|a| other.operators.iter().map(move |b| a.kronecker(b)))
            .collect();
        KrausSet {
            n: self.n + other.n,
            operators,
        }
    }

    /// The same map applied independently to each of `copies` qubit blocks.
    pub fn tensor_power(&self, copies: usize) -> KrausSet {
        assert!(copies > 0);
        (1..copies).fold(self.clone(), |acc, _| acc.tensor(self))
    }

    fn ancilla_dim(&self, total: usize) -> Result<usize> {
        if !total.is_multiple_of(self.dim()) || total < self.dim() {
            return Err(DcqdError::DimensionMismatch(format!(
                "register dimension {total} is not a multiple of channel dimension {}",
                self.dim()
            )));
        }
        Ok(total / self.dim())
    }
}

/// Sequential composition: `first` acts, then `second`. The Kraus set is the
/// raw pairwise product.
pub fn compose(first: &KrausSet, second: &KrausSet) -> Result<KrausSet> {
    if first.n != second.n {
        return Err(DcqdError::DimensionMismatch(format!(
            "cannot compose {}-qubit and {}-qubit maps",
            first.n, second.n
        )));
    }
    let operators = second
        .operators
        .iter()
        .flat_map(|b| first.operators.iter().map(move |a| b * a))
        .collect();
    Ok(KrausSet {
        n: first.n,
        operators,
    })
}

/// Largest entrywise difference between the actions of two maps on the
/// Pauli operator basis. Kraus sets are equivalent iff this vanishes.
pub fn action_distance(a: &KrausSet, b: &KrausSet) -> Result<f64> {
    if a.n != b.n {
        return Err(DcqdError::DimensionMismatch("maps act on different qubit counts".into()));
    }
    Ok(PauliString::all(a.n)
        .map(|p| {
            let m = p.matrix();
            max_abs_diff(&a.apply_operator(&m), &b.apply_operator(&m))
        })
        .fold(0.0, f64::max))
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(DcqdError::InvalidChannel(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_duration(t: f64, constant: f64, name: &str) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(DcqdError::InvalidChannel(format!("duration {t} must be finite and >= 0")));
    }
    if !(constant > 0.0) {
        return Err(DcqdError::InvalidChannel(format!("{name} = {constant} must be positive")));
    }
    Ok(())
}
