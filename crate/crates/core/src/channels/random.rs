//! Choi representation and random completely positive maps for testing.

use rand::Rng;
use rand_distr::StandardNormal;

use super::kraus::KrausSet;
use crate::error::{DcqdError, Result};
use crate::qcore::{c, hermitian_eigen, CMatrix, CVector};

/// Choi matrix `J = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`, input factor first.
pub fn choi_from_kraus(kraus: &KrausSet) -> CMatrix {
    let d = kraus.dim();
    let mut j = CMatrix::zeros(d * d, d * d);
    for k in kraus.operators() {
        let v = choi_vector(k);
        j += &v * v.adjoint();
    }
    j
}

fn choi_vector(k: &CMatrix) -> CVector {
    let d = k.nrows();
    CVector::from_fn(d * d, |idx, _| k[(idx % d, idx / d)])
}

/// Kraus operators from the eigenvectors of a PSD Choi matrix,
/// `K[o, i] = sqrt(λ) v[i·d + o]`.
pub fn kraus_from_choi(n: usize, choi: &CMatrix) -> Result<KrausSet> {
    let d = 1usize << n;
    if choi.nrows() != d * d || choi.ncols() != d * d {
        return Err(DcqdError::DimensionMismatch(format!(
            "Choi matrix for {n} qubits must be {0}x{0}",
            d * d
        )));
    }
    let eig = hermitian_eigen(choi);
    if let Some((min, _)) = eig.last() {
        if *min < -1e-9 {
            return Err(DcqdError::NotCompletelyPositive { min_eigenvalue: *min });
        }
    }
    let ops = eig
        .iter()
        .filter(|(l, _)| *l > 1e-12)
        .map(|(l, v)| CMatrix::from_fn(d, d, |o, i| v[i * d + o] * l.sqrt()))
        .collect();
    KrausSet::new(n, ops)
}

/// `Tr_out J`, which equals `(Σ K†K)ᵀ`.
fn input_marginal(choi: &CMatrix, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| (0..d).map(|o| choi[(i * d + o, j * d + o)]).sum())
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// `f(H)` for Hermitian `H` through its eigen-decomposition.
fn hermitian_fn(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let dim = h.nrows();
    hermitian_eigen(h)
        .into_iter()
        .fold(CMatrix::zeros(dim, dim), |acc, (l, v)| acc + (&v * v.adjoint()) * c(f(l), 0.0))
}

/// Draws a random completely positive map on `n` qubits.
///
/// A Ginibre matrix `G` gives the full-rank Choi matrix `J = GG†`; its input
/// marginal is whitened so that `Σ K†K = I`. For the non-trace-preserving
/// variant the marginal is instead set to a random positive `D` with
/// eigenvalues in `[0.2, 1]`.
pub fn random_cp_map<R: Rng + ?Sized>(n: usize, trace_preserving: bool, rng: &mut R) -> KrausSet {
    let d = 1usize << n;
    let g = ginibre(d * d, d * d, rng);
    let choi = &g * g.adjoint();
    let marginal = input_marginal(&choi, d);
    let mut whiten = hermitian_fn(&marginal, |l| 1.0 / l.sqrt());
    if !trace_preserving {
        let h = ginibre(d, d, rng);
        let basis = hermitian_eigen(&(&h + h.adjoint()));
        let target = basis.iter().fold(CMatrix::zeros(d, d), |acc, (_, v)| {
            let u: f64 = rng.random_range(0.2..1.0);
            acc + (v * v.adjoint()) * c(u.sqrt(), 0.0)
        });
        whiten = target * whiten;
    }
    let left = whiten.kronecker(&CMatrix::identity(d, d));
    let shaped = &left * choi * left.adjoint();
    let set = kraus_from_choi(n, &((&shaped + shaped.adjoint()) * c(0.5, 0.0)))
        .expect("random Choi matrix is positive by construction");
    debug_assert!(!trace_preserving || set.is_trace_preserving());
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::kraus::action_distance;
    use crate::qcore::{hermitian_eigenvalues, identity, max_abs_diff};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn choi_of_identity_is_unnormalized_bell_projector() {
        let j = choi_from_kraus(&KrausSet::identity(1));
        // |00> + |11> unnormalized
        assert_eq!(j[(0, 0)], c(1.0, 0.0));
        assert_eq!(j[(0, 3)], c(1.0, 0.0));
        assert_eq!(j[(3, 3)], c(1.0, 0.0));
        assert_eq!(j[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn choi_round_trip_preserves_action() {
        let chan = KrausSet::amplitude_damping(0.37).unwrap();
        let back = kraus_from_choi(1, &choi_from_kraus(&chan)).unwrap();
        assert!(action_distance(&chan, &back).unwrap() < 1e-14);
    }

    #[test]
    fn random_maps_have_requested_trace_behaviour() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=2 {
            let tp = random_cp_map(n, true, &mut rng);
            assert!(max_abs_diff(&tp.completeness(), &identity(1 << n)) < 1e-12);
            let ntp = random_cp_map(n, false, &mut rng);
            let eig = hermitian_eigenvalues(&ntp.completeness());
            assert!(eig[0] >= 0.2 - 1e-12 && *eig.last().unwrap() <= 1.0 + 1e-12);
            assert!(!ntp.is_trace_preserving());
            let choi_eig = hermitian_eigenvalues(&choi_from_kraus(&ntp));
            assert!(choi_eig[0] > 0.0);
        }
    }
}
