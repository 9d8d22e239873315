use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::KrausSet;
use crate::error::{DcqdError, Result};
use crate::qcore::{
    bell_basis, c, hadamard, identity, pairs_to_blocks, permute_qubits, phase_gate, CMatrix, CVector, Pauli,
    PauliString, StateVector,
};

/// Largest supported number of primary qubits.
pub const MAX_QUBITS: usize = 3;

/// Amplitude magnitudes or products below this count as vanishing.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Per-qubit experimental setting: one row of the single-qubit protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    /// Maximally entangled input, full Bell measurement: populations.
    Pop,
    /// `α|00⟩ + β|11⟩`, stabilizer Z^A Z^B, normalizer X^A X^B: χ03, χ12.
    CohZ,
    /// Hadamard on the primary qubit, stabilizer X^A Z^B, normalizer Z^A X^B: χ01, χ23.
    CohX,
    /// S·H on the primary qubit, stabilizer Y^A Z^B, normalizer Z^A X^B: χ02, χ13.
    CohY,
}

impl Setting {
    pub const ALL: [Setting; 4] = [Setting::Pop, Setting::CohZ, Setting::CohX, Setting::CohY];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Setting::Pop => "POP",
            Setting::CohZ => "COH_Z",
            Setting::CohX => "COH_X",
            Setting::CohY => "COH_Y",
        }
    }

    pub fn is_coherence(self) -> bool {
        self != Setting::Pop
    }

    /// Local rotation on the primary qubit applied after preparing
    /// `α|00⟩ + β|11⟩`.
    pub fn prep_rotation(self) -> CMatrix {
        match self {
            Setting::Pop | Setting::CohZ => identity(2),
            Setting::CohX => hadamard(),
            Setting::CohY => phase_gate() * hadamard(),
        }
    }

    /// Stabilizer of the prepared pair (primary letter first).
    pub fn stabilizer(self) -> PauliString {
        let a = match self {
            Setting::Pop | Setting::CohZ => Pauli::Z,
            Setting::CohX => Pauli::X,
            Setting::CohY => Pauli::Y,
        };
        PauliString::new(vec![a, Pauli::Z]).unwrap()
    }

    /// Commuting normalizer measured alongside the stabilizer.
    pub fn normalizer(self) -> PauliString {
        match self {
            Setting::Pop | Setting::CohZ => PauliString::new(vec![Pauli::X, Pauli::X]).unwrap(),
            Setting::CohX | Setting::CohY => PauliString::new(vec![Pauli::Z, Pauli::X]).unwrap(),
        }
    }
}

/// Amplitudes of the non-maximally entangled input `α|00⟩ + β|11⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitudes {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Default for Amplitudes {
    /// `α = cos(π/8)`, `β = e^{iπ/4} sin(π/8)`: unequal magnitudes and a
    /// relative phase with nonzero real and imaginary parts.
    fn default() -> Self {
        Self {
            alpha: c(FRAC_PI_8.cos(), 0.0),
            beta: Complex64::from_polar(FRAC_PI_8.sin(), FRAC_PI_4),
        }
    }
}

impl Amplitudes {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            return Err(DcqdError::InvalidConfiguration(format!(
                "|α|² + |β|² = {norm}, expected 1"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Real `α`, with `β = sqrt(1 - α²)`.
    pub fn real(alpha: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(DcqdError::InvalidConfiguration(format!("α = {alpha} outside [-1, 1]")));
        }
        Self::new(c(alpha, 0.0), c((1.0 - alpha * alpha).sqrt(), 0.0))
    }

    pub fn maximal() -> Self {
        Self {
            alpha: c(FRAC_1_SQRT_2, 0.0),
            beta: c(FRAC_1_SQRT_2, 0.0),
        }
    }

    /// `⟨Z^A⟩ = |α|² − |β|²`.
    pub fn z_expectation(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }

    /// `⟨X^A X^B⟩ = 2 Re(α β*)`.
    pub fn normalizer_expectation(&self) -> f64 {
        2.0 * (self.alpha * self.beta.conj()).re
    }

    /// `⟨Z^A X^A X^B⟩ = 2i Im(α* β)`.
    pub fn mixed_expectation(&self) -> Complex64 {
        c(0.0, 2.0 * (self.alpha.conj() * self.beta).im)
    }

    /// Requirements of the coherence settings: both amplitudes nonzero with
    /// unequal magnitudes, and `α β*` with nonzero real and imaginary parts.
    pub fn check_coherence(&self) -> Result<()> {
        let (a, b) = (self.alpha.norm(), self.beta.norm());
        if a < DEGENERACY_TOL || b < DEGENERACY_TOL {
            return Err(DcqdError::InvalidConfiguration(
                "coherence settings need both α and β nonzero".into(),
            ));
        }
        if (a - b).abs() < DEGENERACY_TOL {
            return Err(DcqdError::InvalidConfiguration(
                "coherence settings need |α| ≠ |β| (⟨Z^A⟩ vanishes)".into(),
            ));
        }
        let prod = self.alpha * self.beta.conj();
        if prod.re.abs() < DEGENERACY_TOL {
            return Err(DcqdError::InvalidConfiguration(
                "coherence settings need Re(αβ*) ≠ 0 (⟨U⟩ vanishes)".into(),
            ));
        }
        if prod.im.abs() < DEGENERACY_TOL {
            return Err(DcqdError::InvalidConfiguration(
                "coherence settings need Im(αβ*) ≠ 0 (⟨Z^A U⟩ vanishes)".into(),
            ));
        }
        Ok(())
    }
}

/// Joint measurement outcome on one qubit pair, labelled by the stabilizer
/// and normalizer eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub stabilizer: i8,
    pub normalizer: i8,
}

/// Rank-one projector `|v⟩⟨v|` of a configuration's measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementProjector {
    pub labels: Vec<PairOutcome>,
    pub vector: CVector,
}

impl MeasurementProjector {
    pub fn matrix(&self) -> CMatrix {
        &self.vector * self.vector.adjoint()
    }
}

/// One experimental setting on `n` primary/ancilla pairs.
///
/// The register is laid out with all primary qubits first (most
/// significant), then the ancillas in the same order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    settings: Vec<Setting>,
    amplitudes: Amplitudes,
}

impl Configuration {
    /// Checked constructor. Coherence settings require amplitudes that pass
    /// [`Amplitudes::check_coherence`].
    pub fn new(settings: Vec<Setting>, amplitudes: Amplitudes) -> Result<Self> {
        let config = Self::unchecked(settings, amplitudes)?;
        if config.settings.iter().any(|s| s.is_coherence()) {
            amplitudes.check_coherence()?;
        }
        Ok(config)
    }

    /// Skips the amplitude requirements, for diagnosing degenerate inputs
    /// and for partial characterization with weaker conditions.
    pub fn unchecked(settings: Vec<Setting>, amplitudes: Amplitudes) -> Result<Self> {
        if settings.is_empty() || settings.len() > MAX_QUBITS {
            return Err(DcqdError::InvalidConfiguration(format!(
                "{} qubit pairs requested, supported range is 1..={MAX_QUBITS}",
                settings.len()
            )));
        }
        Ok(Self {
            settings,
            amplitudes,
        })
    }

    /// Configuration number `index` of the `4^n` tensor-product settings,
    /// first pair most significant.
    pub fn from_index(n: usize, index: usize, amplitudes: Amplitudes) -> Result<Self> {
        Self::new(settings_from_index(n, index)?, amplitudes)
    }

    pub fn all(n: usize, amplitudes: Amplitudes) -> Result<Vec<Self>> {
        (0..1usize << (2 * n))
            .map(|i| Self::from_index(n, i, amplitudes))
            .collect()
    }

    pub fn settings(&self) -> &[Setting] {
        &self.settings
    }

    pub fn amplitudes(&self) -> Amplitudes {
        self.amplitudes
    }

    pub fn n_pairs(&self) -> usize {
        self.settings.len()
    }

    pub fn index(&self) -> usize {
        self.settings.iter().fold(0, |acc, s| acc * 4 + s.index())
    }

    pub fn label(&self) -> String {
        self.settings.iter().map(|s| s.label()).collect::<Vec<_>>().join("⊗")
    }

    /// Input state `⊗_pairs (V ⊗ I)(α|00⟩ + β|11⟩)`; population pairs use
    /// `α = β = 1/√2`.
    pub fn input_state(&self) -> StateVector {
        let pairs: Vec<CVector> = self
            .settings
            .iter()
            .map(|&s| pair_state(s, &self.amplitudes))
            .collect();
        let interleaved = pairs
            .iter()
            .skip(1)
            .fold(pairs[0].clone(), |acc, v| acc.kronecker(v));
        let blocks = permute_qubits(&interleaved, &pairs_to_blocks(self.n_pairs()));
        StateVector::new(blocks).expect("tensor product of unit vectors")
    }

    /// The `4^n` joint eigenprojectors of the stabilizer/normalizer pairs,
    /// ordered by outcome index (first pair most significant). Per pair the
    /// order follows the Bell basis (φ⁺, ψ⁺, ψ⁻, φ⁻) rotated by the
    /// preparation rotation, so outcome `m` of a population pair flags the
    /// Pauli error with index `m`.
    pub fn projectors(&self) -> Vec<MeasurementProjector> {
        let per_pair: Vec<Vec<(PairOutcome, CVector)>> =
            self.settings.iter().map(|&s| pair_projectors(s)).collect();
        let n = self.n_pairs();
        let order = pairs_to_blocks(n);
        (0..1usize << (2 * n))
            .map(|k| {
                let digits: Vec<usize> = (0..n).map(|j| (k >> (2 * (n - 1 - j))) & 3).collect();
                let labels = digits.iter().enumerate().map(|(j, &d)| per_pair[j][d].0).collect();
                let interleaved = digits
                    .iter()
                    .enumerate()
                    .skip(1)
                    .fold(per_pair[0][digits[0]].1.clone(), |acc, (j, &d)| acc.kronecker(&per_pair[j][d].1));
                MeasurementProjector {
                    labels,
                    vector: permute_qubits(&interleaved, &order),
                }
            })
            .collect()
    }

    /// Exact outcome probabilities `q_k = Tr[Π_k E(ρ)]` with the map acting
    /// on the primary qubits only.
    pub fn outcome_probabilities(&self, channel: &KrausSet) -> Result<OutcomeDistribution> {
        if channel.n_qubits() != self.n_pairs() {
            return Err(DcqdError::DimensionMismatch(format!(
                "{}-qubit map, configuration has {} pairs",
                channel.n_qubits(),
                self.n_pairs()
            )));
        }
        let branches = channel.branches(self.input_state().amplitudes())?;
        let probabilities = self
            .projectors()
            .iter()
            .map(|p| branches.iter().map(|b| p.vector.dotc(b).norm_sqr()).sum())
            .collect();
        Ok(OutcomeDistribution {
            settings: self.settings.clone(),
            probabilities,
        })
    }
}

pub(crate) fn settings_from_index(n: usize, index: usize) -> Result<Vec<Setting>> {
    if n == 0 || n > MAX_QUBITS || index >= 1 << (2 * n) {
        return Err(DcqdError::InvalidConfiguration(format!(
            "configuration {index} out of range for {n} qubits"
        )));
    }
    Ok((0..n)
        .map(|j| Setting::ALL[(index >> (2 * (n - 1 - j))) & 3])
        .collect())
}

fn pair_state(setting: Setting, amplitudes: &Amplitudes) -> CVector {
    let amps = if setting.is_coherence() {
        *amplitudes
    } else {
        Amplitudes::maximal()
    };
    let base = CVector::from_vec(vec![amps.alpha, c(0.0, 0.0), c(0.0, 0.0), amps.beta]);
    setting.prep_rotation().kronecker(&identity(2)) * base
}

/// Rotated Bell vectors of one pair with their eigenvalue labels. Labels
/// are read off numerically, which also checks that each vector is a joint
/// eigenvector of the stabilizer and normalizer.
fn pair_projectors(setting: Setting) -> Vec<(PairOutcome, CVector)> {
    let rot = setting.prep_rotation().kronecker(&identity(2));
    let stab = setting.stabilizer().matrix();
    let norm = setting.normalizer().matrix();
    let eigen = |op: &CMatrix, v: &CVector| -> i8 {
        let image = op * v;
        let value = v.dotc(&image);
        debug_assert!((&image - v * value).norm() < 1e-12, "not an eigenvector");
        if value.re > 0.0 {
            1
        } else {
            -1
        }
    };
    bell_basis()
        .into_iter()
        .map(|b| {
            let v = &rot * b.amplitudes();
            let label = PairOutcome {
                stabilizer: eigen(&stab, &v),
                normalizer: eigen(&norm, &v),
            };
            (label, v)
        })
        .collect()
}

/// Exact probabilities over the `4^n` joint outcomes of one configuration.
/// Sums to `Tr[E(ρ)]`, which is below one for lossy maps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub settings: Vec<Setting>,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn n_pairs(&self) -> usize {
        self.settings.len()
    }

    pub fn config_index(&self) -> usize {
        self.settings.iter().fold(0, |acc, s| acc * 4 + s.index())
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}
