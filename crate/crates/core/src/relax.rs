//! Joint T1/T2 estimation from one Bell-type measurement on a single
//! non-maximally entangled pair.
//!
//! The primary qubit undergoes amplitude damping for `t₁` followed by phase
//! damping for `t₂`. The stabilizer `Z^A Z^B` flags decay, so
//! `Pr(−1) = γ|β|²` with `γ = 1 − e^{−t₁/T1}`. The normalizer `X^A X^B`
//! commutes with it and tracks the surviving coherence
//! `⟨X^A X^B⟩_out / ⟨X^A X^B⟩_in = e^{−t′/2T2′}`, `t′/T2′ = t₁/T1 + t₂/T2`.

use serde::{Deserialize, Serialize};

use crate::channels::{compose, KrausSet};
use crate::dcqd::{Amplitudes, Configuration, OutcomeDistribution, Setting, DEGENERACY_TOL};
use crate::error::{DcqdError, Result};
use crate::qcore::{DensityOperator, StateVector};
use crate::sampling::{sample_counts, CountsTable};

/// Slack allowed before a log argument or ratio above one counts as
/// inconsistent rather than as rounding.
const UNIT_SLACK: f64 = 1e-12;

/// A decay time constant, or the noiseless limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeConstant {
    Finite(f64),
    NoDecay,
}

impl TimeConstant {
    /// `t / T`, zero in the noiseless limit.
    pub fn rate(self, t: f64) -> f64 {
        match self {
            TimeConstant::Finite(tc) => t / tc,
            TimeConstant::NoDecay => 0.0,
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            TimeConstant::Finite(tc) => Some(tc),
            TimeConstant::NoDecay => None,
        }
    }
}

fn check_times(t1: f64, t2: f64) -> Result<()> {
    if !(t1 >= 0.0 && t2 >= 0.0 && t1.is_finite() && t2.is_finite()) {
        return Err(DcqdError::InvalidConfiguration(format!(
            "durations must be finite and nonnegative, got t1={t1}, t2={t2}"
        )));
    }
    Ok(())
}

/// Amplitude damping for `t₁` then phase damping for `t₂`.
pub fn relaxation_channel(t1: f64, time_t1: f64, t2: f64, time_t2: f64) -> Result<KrausSet> {
    check_times(t1, t2)?;
    compose(
        &KrausSet::amplitude_damping_timed(t1, time_t1)?,
        &KrausSet::phase_damping_timed(t2, time_t2)?,
    )
}

/// Two-qubit output `ρ_f` for input `α|00⟩ + β|11⟩`.
pub fn forward_model(amplitudes: &Amplitudes, t1: f64, time_t1: f64, t2: f64, time_t2: f64) -> Result<DensityOperator> {
    if !(time_t1 > 0.0 && time_t2 > 0.0) {
        return Err(DcqdError::InvalidConfiguration(format!(
            "time constants must be positive, got T1={time_t1}, T2={time_t2}"
        )));
    }
    let channel = relaxation_channel(t1, time_t1, t2, time_t2)?;
    channel.apply(&input_state(amplitudes).density())
}

fn input_state(amplitudes: &Amplitudes) -> StateVector {
    configuration(amplitudes).input_state()
}

fn configuration(amplitudes: &Amplitudes) -> Configuration {
    Configuration::unchecked(vec![Setting::CohZ], *amplitudes).expect("one pair")
}

/// `1/T1 = −(1/t₁) ln(1 − 2 Pr(−1) / (1 − ⟨Z^A⟩_in))`.
pub fn estimate_t1(p_minus: f64, t1: f64, z_in: f64) -> Result<TimeConstant> {
    if !(t1 > 0.0 && t1.is_finite()) {
        return Err(DcqdError::InvalidConfiguration(format!("t1 must be positive, got {t1}")));
    }
    if (1.0 - z_in).abs() < DEGENERACY_TOL {
        return Err(DcqdError::IllPosed("⟨Z^A⟩ = 1: the input has no |11⟩ component to decay".into()));
    }
    let arg = 1.0 - 2.0 * p_minus / (1.0 - z_in);
    if !arg.is_finite() || arg > 1.0 + UNIT_SLACK {
        return Err(DcqdError::InconsistentData(format!(
            "decay probability {p_minus} gives log argument {arg} > 1"
        )));
    }
    if arg <= UNIT_SLACK {
        return Err(DcqdError::Saturation(format!(
            "decay probability {p_minus} saturates the damping at t1={t1}"
        )));
    }
    if arg >= 1.0 {
        return Ok(TimeConstant::NoDecay);
    }
    Ok(TimeConstant::Finite(-t1 / arg.ln()))
}

/// `t′/T2′ = −2 ln(⟨X^A X^B⟩_out / ⟨X^A X^B⟩_in)`, then `T2` from
/// `t′/T2′ = t₂/T2 + t₁/T1`.
pub fn estimate_t2(xx_out: f64, xx_in: f64, t1: f64, t2: f64, time_t1: TimeConstant) -> Result<(f64, TimeConstant)> {
    check_times(t1, t2)?;
    if xx_in.abs() < DEGENERACY_TOL {
        return Err(DcqdError::IllPosed("input ⟨X^A X^B⟩ vanishes (Re(αβ*) = 0)".into()));
    }
    let ratio = xx_out / xx_in;
    if !(ratio > 0.0) || ratio > 1.0 + UNIT_SLACK {
        return Err(DcqdError::InconsistentData(format!("coherence ratio {ratio} outside (0, 1]")));
    }
    let total = -2.0 * ratio.min(1.0).ln();
    let dephasing = total - time_t1.rate(t1);
    if dephasing.abs() <= UNIT_SLACK {
        return Ok((total, TimeConstant::NoDecay));
    }
    if dephasing < 0.0 {
        return Err(DcqdError::InconsistentData(format!(
            "t'/T2' = {total} is below the amplitude-damping contribution {}",
            time_t1.rate(t1)
        )));
    }
    if t2 == 0.0 {
        return Err(DcqdError::InconsistentData(format!(
            "dephasing t'/T2' - t1/T1 = {dephasing} observed with t2 = 0"
        )));
    }
    Ok((total, TimeConstant::Finite(t2 / dephasing)))
}

/// Jointly estimated time constants with the inputs that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxEstimate {
    pub time_t1: TimeConstant,
    pub time_t2: TimeConstant,
    pub t_prime_over_t2_prime: f64,
    pub amplitudes: Amplitudes,
    pub t1: f64,
    pub t2: f64,
    pub p_minus: f64,
    pub xx_out: f64,
    /// Experimental configurations used; always one.
    pub configurations: usize,
}

/// Stabilizer `−1` probability and normalizer expectation, both read off the
/// same Bell-type outcome distribution through the projector labels.
pub fn bell_statistics(dist: &OutcomeDistribution) -> Result<(f64, f64)> {
    if dist.settings != [Setting::CohZ] || dist.probabilities.len() != 4 {
        return Err(DcqdError::InvalidConfiguration(
            "relaxation estimates need one COH_Z pair".into(),
        ));
    }
    let labels = configuration(&Amplitudes::default()).projectors();
    let p_minus = labels
        .iter()
        .zip(&dist.probabilities)
        .filter(|(p, _)| p.labels[0].stabilizer < 0)
        .map(|(_, q)| q)
        .sum();
    let xx = labels
        .iter()
        .zip(&dist.probabilities)
        .map(|(p, q)| f64::from(p.labels[0].normalizer) * q)
        .sum();
    Ok((p_minus, xx))
}

/// Estimates T1 and T2 from one configuration's statistics.
pub fn estimate_from_distribution(
    dist: &OutcomeDistribution,
    amplitudes: &Amplitudes,
    t1: f64,
    t2: f64,
) -> Result<RelaxEstimate> {
    let (p_minus, xx_out) = bell_statistics(dist)?;
    let time_t1 = estimate_t1(p_minus, t1, amplitudes.z_expectation())?;
    let (t_prime_over_t2_prime, time_t2) =
        estimate_t2(xx_out, amplitudes.normalizer_expectation(), t1, t2, time_t1)?;
    Ok(RelaxEstimate {
        time_t1,
        time_t2,
        t_prime_over_t2_prime,
        amplitudes: *amplitudes,
        t1,
        t2,
        p_minus,
        xx_out,
        configurations: 1,
    })
}

/// Finite-shot option for [`joint_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shots {
    pub shots: u64,
    pub seed: u64,
}

/// Runs the single COH_Z configuration through `channel` and estimates
/// both time constants, from exact probabilities or from sampled counts.
pub fn joint_estimate(
    channel: &KrausSet,
    amplitudes: &Amplitudes,
    t1: f64,
    t2: f64,
    shots: Option<Shots>,
) -> Result<(RelaxEstimate, Option<CountsTable>)> {
    let exact = configuration(amplitudes).outcome_probabilities(channel)?;
    match shots {
        None => Ok((estimate_from_distribution(&exact, amplitudes, t1, t2)?, None)),
        Some(Shots { shots, seed }) => {
            let counts = sample_counts(&exact, shots, seed)?;
            let est = estimate_from_distribution(&counts.frequencies(), amplitudes, t1, t2)?;
            Ok((est, Some(counts)))
        }
    }
}
