//! Finite-shot statistics and the partial Bell-analyzer model.
//!
//! Counts are drawn with a ChaCha8 generator seeded from the user seed, one
//! stream per configuration index, so each configuration's draw is
//! independent of evaluation order. A multinomial draw is realized as
//! sequential binomial splits. Probability mass missing from a lossy map's
//! distribution lands in a separate `lost` bin.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::channels::{chi_from_kraus, KrausSet};
use crate::dcqd::{Amplitudes, Characterizer, OutcomeDistribution, ReconstructionResult, Setting};
use crate::error::{DcqdError, Result};
use crate::qcore::{frobenius_distance, rank, CMatrix};

/// Sampled counts of one configuration. `counts` plus `lost` sum to `shots`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsTable {
    pub settings: Vec<Setting>,
    pub shots: u64,
    pub counts: Vec<u64>,
    pub lost: u64,
}

impl CountsTable {
    pub fn config_index(&self) -> usize {
        self.settings.iter().fold(0, |acc, s| acc * 4 + s.index())
    }

    /// Empirical frequencies `counts / shots`, as a distribution that can be
    /// fed to reconstruction.
    pub fn frequencies(&self) -> OutcomeDistribution {
        OutcomeDistribution {
            settings: self.settings.clone(),
            probabilities: self.counts.iter().map(|&k| k as f64 / self.shots as f64).collect(),
        }
    }
}

/// Multinomial draw of `shots` outcomes from `dist`.
pub fn sample_counts(dist: &OutcomeDistribution, shots: u64, seed: u64) -> Result<CountsTable> {
    if shots == 0 {
        return Err(DcqdError::InvalidDistribution("shots must be positive".into()));
    }
    if let Some(p) = dist.probabilities.iter().find(|p| !p.is_finite() || **p < -1e-12) {
        return Err(DcqdError::InvalidDistribution(format!("probability {p} is negative or not finite")));
    }
    let total = dist.total();
    if total > 1.0 + 1e-10 {
        return Err(DcqdError::InvalidDistribution(format!("probabilities sum to {total} > 1")));
    }

    let (counts, lost) = multinomial(&dist.probabilities, shots, seed, dist.config_index() as u64)?;
    Ok(CountsTable {
        settings: dist.settings.clone(),
        shots,
        counts,
        lost,
    })
}

/// Sequential binomial splits; mass missing from `probabilities` is
/// returned as the lost count.
fn multinomial(probabilities: &[f64], shots: u64, seed: u64, stream: u64) -> Result<(Vec<u64>, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut remaining = shots;
    let mut mass = 1.0_f64;
    let mut counts = Vec::with_capacity(probabilities.len());
    for &p in probabilities {
        let p = p.max(0.0);
        let k = if remaining == 0 || mass <= 0.0 {
            0
        } else {
            let ratio = (p / mass).clamp(0.0, 1.0);
            Binomial::new(remaining, ratio)
                .map_err(|e| DcqdError::InvalidDistribution(e.to_string()))?
                .sample(&mut rng)
        };
        counts.push(k);
        remaining -= k;
        mass -= p;
    }
    Ok((counts, remaining))
}

/// Reconstruction from sampled data together with its error against the
/// exact χ.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledReconstruction {
    pub result: ReconstructionResult,
    pub counts: Vec<CountsTable>,
    pub frobenius_error: f64,
    /// Smallest eigenvalue of the raw estimate; negative values are
    /// reported, not repaired.
    pub min_eigenvalue: f64,
}

/// Characterizes `channel` from `shots` samples per configuration.
pub fn characterize_sampled(
    channel: &KrausSet,
    amplitudes: &Amplitudes,
    shots: u64,
    seed: u64,
) -> Result<SampledReconstruction> {
    let engine = Characterizer::new(channel.n_qubits(), *amplitudes)?;
    let counts = engine
        .distributions(channel)?
        .iter()
        .map(|d| sample_counts(d, shots, seed))
        .collect::<Result<Vec<_>>>()?;
    let freqs: Vec<OutcomeDistribution> = counts.iter().map(CountsTable::frequencies).collect();
    let result = engine.reconstruct(&freqs)?;
    let frobenius_error = frobenius_distance(result.chi.matrix(), chi_from_kraus(channel).matrix());
    let min_eigenvalue = crate::qcore::hermitian_eigenvalues(result.chi.matrix())[0];
    Ok(SampledReconstruction {
        result,
        counts,
        frobenius_error,
        min_eigenvalue,
    })
}

const BELL_LABELS: [&str; 4] = ["φ+", "ψ+", "ψ-", "φ-"];

/// Partial Bell analyzer on one pair: outcomes in `resolved` are told apart,
/// those in `merged` produce one shared symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpticsModel {
    resolved: Vec<usize>,
    merged: Vec<usize>,
}

impl Default for OpticsModel {
    /// Resolves ψ± and merges φ±.
    fn default() -> Self {
        Self {
            resolved: vec![1, 2],
            merged: vec![0, 3],
        }
    }
}

impl OpticsModel {
    pub fn new(resolved: Vec<usize>, merged: Vec<usize>) -> Result<Self> {
        let mut all: Vec<usize> = resolved.iter().chain(merged.iter()).copied().collect();
        all.sort_unstable();
        if all != [0, 1, 2, 3] || merged.is_empty() {
            return Err(DcqdError::InvalidConfiguration(
                "resolved and merged outcomes must partition {0,1,2,3} with a nonempty merged set".into(),
            ));
        }
        Ok(Self { resolved, merged })
    }

    /// The analyzer after a half-wave rotation on the ancilla, which
    /// exchanges φ± with ψ±: resolves φ±, merges ψ±.
    pub fn complementary() -> Self {
        Self {
            resolved: vec![0, 3],
            merged: vec![1, 2],
        }
    }

    pub fn resolved(&self) -> &[usize] {
        &self.resolved
    }

    pub fn merged(&self) -> &[usize] {
        &self.merged
    }

    /// Output bins ordered by their smallest Bell index.
    pub fn bins(&self) -> Vec<Vec<usize>> {
        let mut bins: Vec<Vec<usize>> = self.resolved.iter().map(|&k| vec![k]).collect();
        let mut merged = self.merged.clone();
        merged.sort_unstable();
        bins.push(merged);
        bins.sort_by_key(|b| b[0]);
        bins
    }

    /// Row-merging matrix mapping the 4 Bell outcomes to the bins.
    pub fn merge_matrix(&self) -> CMatrix {
        let bins = self.bins();
        CMatrix::from_fn(bins.len(), 4, |r, k| {
            if bins[r].contains(&k) {
                crate::qcore::ONE
            } else {
                crate::qcore::ZERO
            }
        })
    }
}

/// One analyzer output symbol and its probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedBin {
    pub outcomes: Vec<usize>,
    pub label: String,
    pub probability: f64,
}

/// Sums probabilities within each analyzer bin.
pub fn apply_optics_model(dist: &OutcomeDistribution, model: &OpticsModel) -> Result<Vec<MergedBin>> {
    if dist.n_pairs() != 1 || dist.probabilities.len() != 4 {
        return Err(DcqdError::DimensionMismatch(
            "the analyzer model is defined for a single pair".into(),
        ));
    }
    Ok(model
        .bins()
        .into_iter()
        .map(|outcomes| MergedBin {
            label: outcomes.iter().map(|&k| BELL_LABELS[k]).collect::<Vec<_>>().join("|"),
            probability: outcomes.iter().map(|&k| dist.probabilities[k]).sum(),
            outcomes,
        })
        .collect())
}

/// Rank of the population unknowns `χ_mm` recoverable from the POP
/// configuration observed through each model in turn. Four means the
/// populations are fully determined.
pub fn population_rank(models: &[OpticsModel]) -> usize {
    let design = crate::dcqd::population_design();
    let diag = CMatrix::from_fn(4, 4, |k, m| design[(k, m * 4 + m)]);
    let rows: Vec<CMatrix> = models.iter().map(|m| m.merge_matrix() * &diag).collect();
    let total: usize = rows.iter().map(|r| r.nrows()).sum();
    if total == 0 {
        return 0;
    }
    let mut stacked = CMatrix::zeros(total, 4);
    let mut at = 0;
    for r in rows {
        stacked.rows_mut(at, r.nrows()).copy_from(&r);
        at += r.nrows();
    }
    rank(&stacked, 1e-10)
}

/// Bell-outcome probabilities recovered by least squares from the bins of
/// several analyzer settings applied to the same configuration.
pub fn recover_outcomes(models: &[OpticsModel], bins: &[Vec<f64>]) -> Result<Vec<f64>> {
    if models.len() != bins.len() {
        return Err(DcqdError::DimensionMismatch("one bin vector per analyzer model".into()));
    }
    let merge: Vec<CMatrix> = models.iter().map(OpticsModel::merge_matrix).collect();
    let rows: usize = merge.iter().map(|m| m.nrows()).sum();
    let mut stacked = CMatrix::zeros(rows, 4);
    let mut rhs = crate::qcore::CVector::zeros(rows);
    let mut at = 0;
    for (m, b) in merge.iter().zip(bins) {
        if b.len() != m.nrows() {
            return Err(DcqdError::DimensionMismatch(format!("expected {} bins, got {}", m.nrows(), b.len())));
        }
        stacked.rows_mut(at, m.nrows()).copy_from(m);
        for (i, v) in b.iter().enumerate() {
            rhs[at + i] = crate::qcore::c(*v, 0.0);
        }
        at += m.nrows();
    }
    if rank(&stacked, 1e-10) < 4 {
        return Err(DcqdError::IllPosed(format!(
            "analyzer settings resolve only {} of 4 Bell outcomes",
            rank(&stacked, 1e-10)
        )));
    }
    let x = stacked
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| DcqdError::IllPosed(e.to_string()))?;
    Ok(x.iter().map(|v| v.re).collect())
}

/// Single-pair characterization through the partial analyzer: every
/// configuration is run once with the default analyzer and once with the
/// complementary one, doubling the configuration count.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticsReconstruction {
    pub result: ReconstructionResult,
    pub configurations: usize,
    pub frobenius_error: f64,
}

pub fn characterize_with_optics(
    channel: &KrausSet,
    amplitudes: &Amplitudes,
    shots: Option<(u64, u64)>,
) -> Result<OpticsReconstruction> {
    if channel.n_qubits() != 1 {
        return Err(DcqdError::InvalidConfiguration(
            "the analyzer model is defined for a single pair".into(),
        ));
    }
    let models = [OpticsModel::default(), OpticsModel::complementary()];
    let engine = Characterizer::new(1, *amplitudes)?;
    let mut recovered = Vec::new();
    let mut configurations = 0;
    for dist in engine.distributions(channel)? {
        let mut bins = Vec::new();
        for (mi, model) in models.iter().enumerate() {
            let exact: Vec<f64> = apply_optics_model(&dist, model)?.iter().map(|b| b.probability).collect();
            configurations += 1;
            bins.push(match shots {
                None => exact,
                Some((n, seed)) => {
                    let stream = (mi * 4 + dist.config_index()) as u64;
                    multinomial(&exact, n, seed, stream)?.0.iter().map(|&k| k as f64 / n as f64).collect()
                }
            });
        }
        recovered.push(OutcomeDistribution {
            settings: dist.settings.clone(),
            probabilities: recover_outcomes(&models, &bins)?,
        });
    }
    let result = engine.reconstruct(&recovered)?;
    let frobenius_error = frobenius_distance(result.chi.matrix(), chi_from_kraus(channel).matrix());
    Ok(OpticsReconstruction {
        result,
        configurations,
        frobenius_error,
    })
}
