//! Generic linear inversion of `q_k = Σ_mn χ_mn Tr[Π_k E_m ρ_c E_n†]`
//! stacked over all configurations.
//!
//! For `n` pairs the stacked design matrix is, up to a permutation of rows
//! and columns, the `n`-fold Kronecker power of the 16×16 single-pair
//! design. Small registers are solved by dense LU; three pairs go through
//! the Kronecker structure, which avoids a 4096×4096 factorization.

use nalgebra::linalg::LU;
use nalgebra::Dyn;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::closed_form::closed_form_chi;
use super::config::{settings_from_index, Amplitudes, Configuration, OutcomeDistribution, Setting, MAX_QUBITS};
use crate::channels::{KrausSet, ProcessMatrix};
use crate::error::{DcqdError, Result};
use crate::qcore::{c, identity, max_abs_diff, rank, singular_values, CMatrix, CVector, PauliString, ZERO};

/// Relative singular-value cutoff for declaring the design rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Largest register solved by a dense LU of the stacked system.
const DENSE_MAX_QUBITS: usize = 2;

/// `A[k, m·D + m'] = a_km conj(a_km')` with `a_km = ⟨π_k|(E_m ⊗ I)|ψ_c⟩`,
/// so that `q = A vec(χ)` for row-major `vec`.
pub fn design_matrix(config: &Configuration) -> CMatrix {
    let amps = amplitude_table(config);
    let d = amps.nrows();
    CMatrix::from_fn(d, d * d, |k, col| amps[(k, col / d)] * amps[(k, col % d)].conj())
}

/// `a_km` for one configuration, outcomes as rows, Pauli strings as columns.
fn amplitude_table(config: &Configuration) -> CMatrix {
    let n = config.n_pairs();
    let d = 1usize << (2 * n);
    let psi = config.input_state();
    let ancilla = identity(1 << n);
    let images: Vec<CVector> = PauliString::all(n)
        .map(|p| p.matrix().kronecker(&ancilla) * psi.amplitudes())
        .collect();
    let projectors = config.projectors();
    CMatrix::from_fn(d, d, |k, m| projectors[k].vector.dotc(&images[m]))
}

/// All `4^n` design matrices stacked, rows `c·4^n + k` ordered by
/// configuration index. Degenerate amplitudes are accepted so that their
/// rank can be inspected.
pub fn stacked_design_matrix(n: usize, amplitudes: &Amplitudes) -> Result<CMatrix> {
    check_qubits(n)?;
    let d = 1usize << (2 * n);
    let mut stacked = CMatrix::zeros(d * d, d * d);
    for ci in 0..d {
        let config = Configuration::unchecked(settings_from_index(n, ci)?, *amplitudes)?;
        stacked.rows_mut(ci * d, d).copy_from(&design_matrix(&config));
    }
    Ok(stacked)
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(DcqdError::InvalidConfiguration(format!(
            "{n} qubits requested, supported range is 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Conditioning of the stacked design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignDiagnostics {
    pub rank: usize,
    pub unknowns: usize,
    pub singular_min: f64,
    pub singular_max: f64,
    pub condition_number: f64,
}

impl DesignDiagnostics {
    pub fn from_matrix(a: &CMatrix) -> Self {
        Self::from_singular_values(&singular_values(a), rank(a, RANK_TOL), a.ncols())
    }

    fn from_singular_values(sv: &[f64], rank: usize, unknowns: usize) -> Self {
        let singular_max = sv.first().copied().unwrap_or(0.0);
        let singular_min = if sv.len() < unknowns { 0.0 } else { sv.last().copied().unwrap_or(0.0) };
        Self {
            rank,
            unknowns,
            singular_min,
            singular_max,
            condition_number: singular_max / singular_min,
        }
    }

    pub fn full_rank(&self) -> bool {
        self.rank == self.unknowns
    }
}

/// Index of `hi·4^n + lo` in pair-major order `Σ_j (h_j·4 + l_j)·16^(n−1−j)`,
/// which is how rows and columns of the Kronecker power are arranged.
fn pair_major(n: usize, index: usize) -> usize {
    let d = 1usize << (2 * n);
    let (hi, lo) = (index / d, index % d);
    (0..n).fold(0, |acc, j| {
        let shift = 2 * (n - 1 - j);
        acc * 16 + ((hi >> shift) & 3) * 4 + ((lo >> shift) & 3)
    })
}

/// Applies `M^{⊗n}` to a pair-major vector, one factor at a time.
fn apply_kron_power(m: &CMatrix, x: &[Complex64], n: usize) -> Vec<Complex64> {
    let b = m.nrows();
    let mut cur = x.to_vec();
    let mut buf = vec![ZERO; b];
    for j in 0..n {
        let stride = b.pow((n - 1 - j) as u32);
        for outer in 0..b.pow(j as u32) {
            for inner in 0..stride {
                let base = outer * b * stride + inner;
                for (a, slot) in buf.iter_mut().enumerate() {
                    *slot = (0..b).map(|s| m[(a, s)] * cur[base + s * stride]).sum();
                }
                for (a, v) in buf.iter().enumerate() {
                    cur[base + a * stride] = *v;
                }
            }
        }
    }
    cur
}

enum Solver {
    Dense(LU<Complex64, Dyn, Dyn>),
    Kronecker(CMatrix),
}

/// Linear-inversion engine for a fixed register size and amplitude choice.
pub struct Characterizer {
    n: usize,
    amplitudes: Amplitudes,
    single: CMatrix,
    diagnostics: DesignDiagnostics,
    solver: Solver,
}

impl std::fmt::Debug for Characterizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Characterizer")
            .field("n", &self.n)
            .field("amplitudes", &self.amplitudes)
            .field("diagnostics", &self.diagnostics)
            .finish()
    }
}

impl Characterizer {
    /// Builds the design and factorizes it. A rank-deficient design is
    /// rejected as ill-posed with the vanishing amplitude factor named.
    pub fn new(n: usize, amplitudes: Amplitudes) -> Result<Self> {
        check_qubits(n)?;
        let single = stacked_design_matrix(1, &amplitudes)?;
        let sv1 = singular_values(&single);
        let rank1 = rank(&single, RANK_TOL);
        // singular values of a Kronecker power are all n-fold products
        let mut sv: Vec<f64> = vec![1.0];
        for _ in 0..n {
            sv = sv.iter().flat_map(|a| sv1.iter().map(move |b| a * b)).collect();
        }
        sv.sort_by(|a, b| b.total_cmp(a));
        let diagnostics = DesignDiagnostics::from_singular_values(&sv, rank1.pow(n as u32), 1 << (4 * n));
        if !diagnostics.full_rank() {
            let reason = amplitudes
                .check_coherence()
                .err()
                .map(|e| match e {
                    DcqdError::InvalidConfiguration(m) => format!(": {m}"),
                    other => format!(": {other}"),
                })
                .unwrap_or_default();
            return Err(DcqdError::IllPosed(format!(
                "stacked design has rank {} < {}{reason}",
                diagnostics.rank, diagnostics.unknowns
            )));
        }
        let solver = if n <= DENSE_MAX_QUBITS {
            Solver::Dense(stacked_design_matrix(n, &amplitudes)?.lu())
        } else {
            let inverse = single
                .clone()
                .try_inverse()
                .ok_or_else(|| DcqdError::IllPosed("single-pair design is singular".into()))?;
            Solver::Kronecker(inverse)
        };
        Ok(Self {
            n,
            amplitudes,
            single,
            diagnostics,
            solver,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> Amplitudes {
        self.amplitudes
    }

    pub fn diagnostics(&self) -> DesignDiagnostics {
        self.diagnostics
    }

    pub fn configurations(&self) -> Result<Vec<Configuration>> {
        Configuration::all(self.n, self.amplitudes)
    }

    /// Exact distributions of every configuration, ordered by index.
    pub fn distributions(&self, channel: &KrausSet) -> Result<Vec<OutcomeDistribution>> {
        self.configurations()?
            .iter()
            .map(|config| config.outcome_probabilities(channel))
            .collect()
    }

    /// Stacks distributions (any order, one per configuration) into `q`.
    fn stack(&self, dists: &[OutcomeDistribution]) -> Result<Vec<Complex64>> {
        let d = 1usize << (2 * self.n);
        let mut q = vec![None; d * d];
        for dist in dists {
            if dist.n_pairs() != self.n || dist.probabilities.len() != d {
                return Err(DcqdError::DimensionMismatch(format!(
                    "distribution over {} outcomes for {} pairs, expected {d} outcomes for {} pairs",
                    dist.probabilities.len(),
                    dist.n_pairs(),
                    self.n
                )));
            }
            let ci = dist.config_index();
            for (k, p) in dist.probabilities.iter().enumerate() {
                if q[ci * d + k].replace(c(*p, 0.0)).is_some() {
                    return Err(DcqdError::InvalidConfiguration(format!(
                        "configuration {ci} supplied twice"
                    )));
                }
            }
        }
        q.into_iter()
            .enumerate()
            .map(|(i, v)| {
                v.ok_or_else(|| DcqdError::InvalidConfiguration(format!("configuration {} missing", i / d)))
            })
            .collect()
    }

    fn to_pair_major(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; x.len()];
        for (i, v) in x.iter().enumerate() {
            out[pair_major(self.n, i)] = *v;
        }
        out
    }

    fn unpermute(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..x.len()).map(|i| x[pair_major(self.n, i)]).collect()
    }

    /// `A vec(χ)` for the stacked design.
    pub fn forward(&self, chi: &CMatrix) -> Vec<Complex64> {
        let x: Vec<Complex64> = chi.transpose().iter().copied().collect();
        let y = apply_kron_power(&self.single, &self.to_pair_major(&x), self.n);
        self.unpermute(&y)
    }

    /// Raw linear-inversion χ, symmetrized to be Hermitian, together with
    /// the maximum equation residual.
    pub fn invert(&self, dists: &[OutcomeDistribution]) -> Result<(ProcessMatrix, f64)> {
        let q = self.stack(dists)?;
        let x: Vec<Complex64> = match &self.solver {
            Solver::Dense(lu) => lu
                .solve(&CVector::from_vec(q.clone()))
                .ok_or_else(|| DcqdError::IllPosed("stacked design is singular".into()))?
                .iter()
                .copied()
                .collect(),
            Solver::Kronecker(inverse) => {
                let y = apply_kron_power(inverse, &self.to_pair_major(&q), self.n);
                self.unpermute(&y)
            }
        };
        let d = 1usize << (2 * self.n);
        let raw = CMatrix::from_row_slice(d, d, &x);
        let chi = (&raw + raw.adjoint()) * c(0.5, 0.0);
        let residual = self
            .forward(&chi)
            .iter()
            .zip(q.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok((ProcessMatrix::new(self.n, chi)?, residual))
    }

    /// Full reconstruction from one distribution per configuration. For a
    /// single pair the closed-form path runs too and the largest entrywise
    /// difference between the two is reported.
    pub fn reconstruct(&self, dists: &[OutcomeDistribution]) -> Result<ReconstructionResult> {
        let (chi, fit_residual) = self.invert(dists)?;
        let closed_form = if self.n == 1 {
            Some(closed_form_chi(dists, &self.amplitudes)?)
        } else {
            None
        };
        let residual = closed_form.as_ref().map(|cf| max_abs_diff(cf.matrix(), chi.matrix()));
        Ok(ReconstructionResult {
            chi,
            closed_form,
            residual,
            fit_residual,
            diagnostics: self.diagnostics,
            configurations: dists.len(),
        })
    }

    pub fn characterize(&self, channel: &KrausSet) -> Result<ReconstructionResult> {
        self.reconstruct(&self.distributions(channel)?)
    }
}

/// Outcome of a full characterization.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    /// Linear-inversion estimate, Hermitian by construction.
    pub chi: ProcessMatrix,
    /// Closed-form estimate, single pair only.
    pub closed_form: Option<ProcessMatrix>,
    /// Largest `|closed-form − linear-inversion|` entry, when both exist.
    pub residual: Option<f64>,
    /// Largest `|A vec(χ) − q|` over all stacked equations.
    pub fit_residual: f64,
    pub diagnostics: DesignDiagnostics,
    /// Number of experimental configurations consumed.
    pub configurations: usize,
}

/// Characterizes `channel` from exact statistics of all `4^n`
/// configurations.
pub fn characterize(channel: &KrausSet, amplitudes: &Amplitudes) -> Result<ReconstructionResult> {
    Characterizer::new(channel.n_qubits(), *amplitudes)?.characterize(channel)
}

/// The single-pair POP design, which is the identity on the diagonal
/// unknowns.
pub fn population_design() -> CMatrix {
    let config = Configuration::unchecked(vec![Setting::Pop], Amplitudes::maximal()).expect("one pair");
    design_matrix(&config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{chi_from_kraus, random_cp_map};
    use crate::qcore::frobenius_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn population_rows_pick_diagonals() {
        let a = population_design();
        for k in 0..4 {
            for col in 0..16 {
                let expected = if col == k * 4 + k { 1.0 } else { 0.0 };
                assert!((a[(k, col)] - c(expected, 0.0)).norm() < 1e-15, "k={k} col={col}");
            }
        }
    }

    #[test]
    fn design_reproduces_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let chan = random_cp_map(1, false, &mut rng);
        let chi = chi_from_kraus(&chan);
        let x: Vec<Complex64> = chi.matrix().transpose().iter().copied().collect();
        for config in Configuration::all(1, Amplitudes::default()).unwrap() {
            let q = design_matrix(&config) * CVector::from_vec(x.clone());
            let exact = config.outcome_probabilities(&chan).unwrap();
            for (a, b) in q.iter().zip(exact.probabilities.iter()) {
                assert!((a - c(*b, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn stacked_rank() {
        let full = stacked_design_matrix(1, &Amplitudes::default()).unwrap();
        assert_eq!(rank(&full, RANK_TOL), 16);
        let degenerate = Amplitudes::maximal();
        assert!(rank(&stacked_design_matrix(1, &degenerate).unwrap(), RANK_TOL) < 16);
        let real = Amplitudes::real(0.8).unwrap();
        assert!(rank(&stacked_design_matrix(1, &real).unwrap(), RANK_TOL) < 16);
    }

    #[test]
    fn kronecker_structure_matches_dense() {
        let amps = Amplitudes::default();
        let single = stacked_design_matrix(1, &amps).unwrap();
        let dense = stacked_design_matrix(2, &amps).unwrap();
        for i in 0..256 {
            for j in 0..256 {
                let (pi, pj) = (pair_major(2, i), pair_major(2, j));
                let kron = single[(pi / 16, pj / 16)] * single[(pi % 16, pj % 16)];
                assert!((dense[(i, j)] - kron).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn kronecker_diagnostics_match_dense_svd() {
        let amps = Amplitudes::default();
        let from_kron = Characterizer::new(2, amps).unwrap().diagnostics();
        let dense = DesignDiagnostics::from_matrix(&stacked_design_matrix(2, &amps).unwrap());
        assert_eq!(from_kron.rank, dense.rank);
        assert!((from_kron.singular_min - dense.singular_min).abs() < 1e-12);
        assert!((from_kron.singular_max - dense.singular_max).abs() < 1e-12);
    }

    #[test]
    fn degenerate_amplitudes_are_ill_posed() {
        let err = Characterizer::new(1, Amplitudes::real(0.8).unwrap()).unwrap_err();
        assert!(matches!(err, DcqdError::IllPosed(ref m) if m.contains("Im(αβ*)")), "{err}");
        assert!(matches!(Characterizer::new(1, Amplitudes::maximal()), Err(DcqdError::IllPosed(_))));
    }

    #[test]
    fn identity_single_qubit() {
        let r = characterize(&KrausSet::identity(1), &Amplitudes::default()).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = c(1.0, 0.0);
        assert!(max_abs_diff(r.chi.matrix(), &expected) < 1e-12);
        assert!(r.residual.unwrap() < 1e-10);
        assert_eq!(r.configurations, 4);
    }

    #[test]
    fn random_single_qubit_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = Characterizer::new(1, Amplitudes::default()).unwrap();
        for i in 0..10 {
            let chan = random_cp_map(1, i % 2 == 1, &mut rng);
            let r = ch.characterize(&chan).unwrap();
            assert!(frobenius_distance(r.chi.matrix(), chi_from_kraus(&chan).matrix()) < 1e-9);
            assert!(r.residual.unwrap() < 1e-9);
            assert!(r.fit_residual < 1e-12);
        }
    }

    #[test]
    fn two_qubit_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let chan = random_cp_map(2, true, &mut rng);
        let r = characterize(&chan, &Amplitudes::default()).unwrap();
        assert!(frobenius_distance(r.chi.matrix(), chi_from_kraus(&chan).matrix()) < 1e-8);
        assert_eq!(r.configurations, 16);
        assert!(r.residual.is_none());
    }

    #[test]
    fn three_qubit_map_through_kronecker_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let chan = random_cp_map(3, true, &mut rng);
        let r = characterize(&chan, &Amplitudes::default()).unwrap();
        assert!(frobenius_distance(r.chi.matrix(), chi_from_kraus(&chan).matrix()) < 1e-8);
        assert_eq!(r.configurations, 64);
    }

    #[test]
    fn missing_or_duplicate_configurations_rejected() {
        let ch = Characterizer::new(1, Amplitudes::default()).unwrap();
        let mut dists = ch.distributions(&KrausSet::identity(1)).unwrap();
        dists.pop();
        assert!(ch.invert(&dists).is_err());
        let first = dists[0].clone();
        dists.push(first);
        assert!(ch.invert(&dists).is_err());
    }
}
