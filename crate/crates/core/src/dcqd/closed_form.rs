//! Closed-form single-pair reconstruction: populations from the Bell
//! measurement on a maximally entangled input, coherences from the
//! stabilizer and normalizer statistics of the non-maximally entangled
//! inputs, followed by the change of frame induced by the preparation
//! rotation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::{Amplitudes, OutcomeDistribution, Setting, DEGENERACY_TOL};
use crate::channels::ProcessMatrix;
use crate::error::{DcqdError, Result};
use crate::qcore::{c, trace, CMatrix, Pauli};

/// Populations `χ_mm = q_m` from an all-population configuration. For
/// several pairs the joint outcome index is the joint Pauli index.
pub fn reconstruct_population(dist: &OutcomeDistribution) -> Result<Vec<f64>> {
    if dist.settings.iter().any(|s| s.is_coherence()) {
        return Err(DcqdError::InvalidConfiguration(
            "populations need the population setting on every pair".into(),
        ));
    }
    Ok(dist.probabilities.clone())
}

/// The two coherences a coherence setting determines, in the frame rotated
/// by its preparation: `χ'_03` and `χ'_12`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatedCoherence {
    pub chi03: Complex64,
    pub chi12: Complex64,
}

/// Signed permutation `V† E_m V = s_m E_{π(m)}` of the single-qubit Pauli
/// basis under a setting's preparation rotation. Entry `m` is `(π(m), s_m)`.
pub fn frame_permutation(setting: Setting) -> [(usize, f64); 4] {
    let v = setting.prep_rotation();
    Pauli::ALL.map(|p| {
        let conj = v.adjoint() * p.matrix() * &v;
        Pauli::ALL
            .iter()
            .find_map(|q| {
                let overlap = trace(&(q.matrix() * &conj)) / 2.0;
                ((overlap.norm() - 1.0).abs() < 1e-12).then(|| (q.index(), overlap.re.signum()))
            })
            .expect("Clifford rotation permutes Pauli operators")
    })
}

/// Solves the four stabilizer/normalizer equations of one coherence setting
/// for the real and imaginary parts of `χ'_03` and `χ'_12`:
///
/// ```text
/// q0 + q3 = χ'00 + χ'33 + 2 Re χ'03 ⟨Z^A⟩
/// q1 + q2 = χ'11 + χ'22 + 2 Im χ'12 ⟨Z^A⟩
/// q0 − q3 = (χ'00 − χ'33) ⟨U⟩ + 2i Im χ'03 ⟨Z^A U⟩
/// q1 − q2 = (χ'11 − χ'22) ⟨U⟩ − 2i Re χ'12 ⟨Z^A U⟩
/// ```
///
/// with `U = X^A X^B`. `populations` are the canonical-frame χ_mm from the
/// population setting.
pub fn reconstruct_coherence(
    dist: &OutcomeDistribution,
    amplitudes: &Amplitudes,
    populations: &[f64; 4],
) -> Result<RotatedCoherence> {
    let setting = match dist.settings.as_slice() {
        [s] if s.is_coherence() => *s,
        _ => {
            return Err(DcqdError::InvalidConfiguration(
                "closed-form coherence needs a single-pair coherence setting".into(),
            ))
        }
    };
    let z = amplitudes.z_expectation();
    let u = amplitudes.normalizer_expectation();
    let zu = amplitudes.mixed_expectation();
    if z.abs() < DEGENERACY_TOL {
        return Err(DcqdError::IllPosed("⟨Z^A⟩ vanishes (|α| = |β|)".into()));
    }
    if u.abs() < DEGENERACY_TOL {
        return Err(DcqdError::IllPosed("⟨U⟩ = ⟨X^A X^B⟩ vanishes (Re(αβ*) = 0)".into()));
    }
    if zu.norm() < DEGENERACY_TOL {
        return Err(DcqdError::IllPosed("⟨Z^A U⟩ vanishes (Im(αβ*) = 0)".into()));
    }

    let mut rotated = [0.0; 4];
    for (m, (target, _)) in frame_permutation(setting).iter().enumerate() {
        rotated[*target] = populations[m];
    }
    let q = &dist.probabilities;
    let two_i_zu = c(0.0, 2.0) * zu;

    let re03 = (q[0] + q[3] - rotated[0] - rotated[3]) / (2.0 * z);
    let im12 = (q[1] + q[2] - rotated[1] - rotated[2]) / (2.0 * z);
    let im03 = ((q[0] - q[3] - (rotated[0] - rotated[3]) * u) / two_i_zu).re;
    let re12 = ((q[1] - q[2] - (rotated[1] - rotated[2]) * u) / (-two_i_zu)).re;

    Ok(RotatedCoherence {
        chi03: c(re03, im03),
        chi12: c(re12, im12),
    })
}

/// Maps rotated-frame coherences back to canonical χ entries through
/// `χ_mn = s_m s_n χ'_{π(m)π(n)}`. Returns `((m, n), χ_mn)` with `m < n`:
/// (0,3),(1,2) for COH_Z; (0,1),(2,3) for COH_X; (0,2),(1,3) for COH_Y.
pub fn map_frame(rotated: &RotatedCoherence, setting: Setting) -> [((usize, usize), Complex64); 2] {
    let perm = frame_permutation(setting);
    let source = |target: usize| perm.iter().position(|(t, _)| *t == target).unwrap();
    let entry = |a: usize, b: usize, value: Complex64| {
        let (m, n) = (source(a), source(b));
        let v = value * (perm[m].1 * perm[n].1);
        if m < n {
            ((m, n), v)
        } else {
            ((n, m), v.conj())
        }
    };
    [entry(0, 3, rotated.chi03), entry(1, 2, rotated.chi12)]
}

/// Full single-qubit χ from the four settings' distributions, in any order.
pub fn closed_form_chi(dists: &[OutcomeDistribution], amplitudes: &Amplitudes) -> Result<ProcessMatrix> {
    let find = |s: Setting| {
        dists
            .iter()
            .find(|d| d.settings == [s])
            .ok_or_else(|| DcqdError::InvalidConfiguration(format!("missing single-pair {} distribution", s.label())))
    };
    let pops = reconstruct_population(find(Setting::Pop)?)?;
    let pops: [f64; 4] = pops
        .try_into()
        .map_err(|_| DcqdError::DimensionMismatch("population distribution must have 4 outcomes".into()))?;
    let mut chi = CMatrix::zeros(4, 4);
    for (m, p) in pops.iter().enumerate() {
        chi[(m, m)] = c(*p, 0.0);
    }
    for setting in [Setting::CohZ, Setting::CohX, Setting::CohY] {
        let rotated = reconstruct_coherence(find(setting)?, amplitudes, &pops)?;
        for ((m, n), v) in map_frame(&rotated, setting) {
            chi[(m, n)] = v;
            chi[(n, m)] = v.conj();
        }
    }
    ProcessMatrix::new(1, chi)
}
