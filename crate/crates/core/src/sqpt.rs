//! Standard process tomography baseline: product inputs from
//! {|0⟩, |1⟩, |+⟩, |+i⟩}, Pauli state tomography of each output, and linear
//! inversion of `E(ρ_j) = Σ χ_mn E_m ρ_j E_n†`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::linalg::LU;
use nalgebra::Dyn;
use num_complex::Complex64;

use crate::channels::{KrausSet, ProcessMatrix};
use crate::error::{DcqdError, Result};
use crate::qcore::{c, rank, tensor_all, trace, CMatrix, CVector, DensityOperator, PauliString};

/// Largest register the baseline handles.
pub const SQPT_MAX_QUBITS: usize = 2;

fn single_qubit_inputs() -> [CMatrix; 4] {
    let ket = |a: Complex64, b: Complex64| {
        let v = CVector::from_vec(vec![a, b]);
        &v * v.adjoint()
    };
    let h = c(FRAC_1_SQRT_2, 0.0);
    [
        ket(c(1.0, 0.0), c(0.0, 0.0)),
        ket(c(0.0, 0.0), c(1.0, 0.0)),
        ket(h, h),
        ket(h, h * c(0.0, 1.0)),
    ]
}

/// Inputs and measurement settings of the baseline on `n` qubits.
#[derive(Debug, Clone)]
pub struct SqptPlan {
    n: usize,
    inputs: Vec<DensityOperator>,
    lu: LU<Complex64, Dyn, Dyn>,
}

impl SqptPlan {
    /// Builds the `4^n` product inputs and factorizes the map from χ to the
    /// stacked output matrices.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > SQPT_MAX_QUBITS {
            return Err(DcqdError::InvalidConfiguration(format!(
                "standard tomography supports 1..={SQPT_MAX_QUBITS} qubits, got {n}"
            )));
        }
        let singles = single_qubit_inputs();
        let d = 1usize << n;
        let inputs: Vec<DensityOperator> = (0..d * d)
            .map(|j| {
                let factors: Vec<&CMatrix> = (0..n).map(|q| &singles[(j >> (2 * (n - 1 - q))) & 3]).collect();
                DensityOperator::new(tensor_all(factors)).expect("pure product state")
            })
            .collect();

        let gram = CMatrix::from_fn(inputs.len(), inputs.len(), |i, j| {
            trace(&(inputs[i].matrix() * inputs[j].matrix()))
        });
        if rank(&gram, 1e-10) < inputs.len() {
            return Err(DcqdError::IllConditionedPlan(
                "input states do not span the operator space".into(),
            ));
        }

        let paulis: Vec<CMatrix> = PauliString::all(n).map(|p| p.matrix()).collect();
        let dd = d * d;
        let mut system = CMatrix::zeros(dd * dd, dd * dd);
        for (j, rho) in inputs.iter().enumerate() {
            for (m, em) in paulis.iter().enumerate() {
                let left = em * rho.matrix();
                for (k, ek) in paulis.iter().enumerate() {
                    let block = &left * ek.adjoint();
                    for a in 0..d {
                        for b in 0..d {
                            system[(j * dd + a * d + b, m * dd + k)] = block[(a, b)];
                        }
                    }
                }
            }
        }
        if rank(&system, 1e-10) < dd * dd {
            return Err(DcqdError::IllConditionedPlan(
                "tomography system is singular".into(),
            ));
        }
        Ok(Self {
            n,
            inputs,
            lu: system.lu(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn inputs(&self) -> &[DensityOperator] {
        &self.inputs
    }

    /// Distinct input states, `4^n`.
    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    /// Measurement settings per input as counted for full Pauli tomography,
    /// `4^n`.
    pub fn n_settings(&self) -> usize {
        1 << (2 * self.n)
    }

    /// Total experimental configurations, `16^n`.
    pub fn n_experiments(&self) -> usize {
        self.n_inputs() * self.n_settings()
    }

    /// Output state of each input, rebuilt from its exact Pauli expectations
    /// `ρ = Σ_P ⟨P⟩ P / d`.
    pub fn tomography(&self, channel: &KrausSet) -> Result<Vec<CMatrix>> {
        if channel.n_qubits() != self.n {
            return Err(DcqdError::DimensionMismatch(format!(
                "{}-qubit map, plan for {} qubits",
                channel.n_qubits(),
                self.n
            )));
        }
        let d = 1usize << self.n;
        let paulis: Vec<CMatrix> = PauliString::all(self.n).map(|p| p.matrix()).collect();
        Ok(self
            .inputs
            .iter()
            .map(|rho| {
                let out = channel.apply_operator(rho.matrix());
                paulis.iter().fold(CMatrix::zeros(d, d), |acc, p| {
                    let expectation = trace(&(p * &out)).re;
                    acc + p * c(expectation / d as f64, 0.0)
                })
            })
            .collect())
    }

    /// Linear inversion from tomographically reconstructed outputs.
    pub fn invert(&self, outputs: &[CMatrix]) -> Result<ProcessMatrix> {
        let d = 1usize << self.n;
        let dd = d * d;
        if outputs.len() != self.inputs.len() || outputs.iter().any(|o| o.shape() != (d, d)) {
            return Err(DcqdError::DimensionMismatch(format!(
                "expected {} output matrices of size {d}x{d}",
                self.inputs.len()
            )));
        }
        let rhs = CVector::from_iterator(
            dd * dd,
            outputs.iter().flat_map(|o| (0..d).flat_map(move |a| (0..d).map(move |b| o[(a, b)]))),
        );
        let x = self
            .lu
            .solve(&rhs)
            .ok_or_else(|| DcqdError::IllConditionedPlan("tomography system is singular".into()))?;
        let raw = CMatrix::from_row_slice(dd, dd, x.as_slice());
        ProcessMatrix::new(self.n, (&raw + raw.adjoint()) * c(0.5, 0.0))
    }

    pub fn characterize(&self, channel: &KrausSet) -> Result<SqptResult> {
        Ok(SqptResult {
            chi: self.invert(&self.tomography(channel)?)?,
            inputs: self.n_inputs(),
            settings: self.n_settings(),
            experiments: self.n_experiments(),
        })
    }
}

/// Baseline reconstruction with the resources it consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct SqptResult {
    pub chi: ProcessMatrix,
    pub inputs: usize,
    pub settings: usize,
    pub experiments: usize,
}

pub fn sqpt_characterize(channel: &KrausSet) -> Result<SqptResult> {
    SqptPlan::new(channel.n_qubits())?.characterize(channel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{chi_from_kraus, random_cp_map};
    use crate::dcqd::{characterize, Amplitudes};
    use crate::qcore::max_abs_diff;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_single_qubit() {
        let r = sqpt_characterize(&KrausSet::identity(1)).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = c(1.0, 0.0);
        assert!(max_abs_diff(r.chi.matrix(), &expected) < 1e-12);
        assert_eq!(r.experiments, 16);
    }

    #[test]
    fn agrees_with_ground_truth_and_dcqd() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for i in 0..10 {
            let chan = random_cp_map(1, i % 2 == 0, &mut rng);
            let s = sqpt_characterize(&chan).unwrap();
            assert!(max_abs_diff(s.chi.matrix(), chi_from_kraus(&chan).matrix()) < 1e-9);
            let d = characterize(&chan, &Amplitudes::default()).unwrap();
            assert!(max_abs_diff(s.chi.matrix(), d.chi.matrix()) < 1e-8);
        }
    }

    #[test]
    fn two_qubit_counts_and_accuracy() {
        let plan = SqptPlan::new(2).unwrap();
        assert_eq!((plan.n_inputs(), plan.n_settings(), plan.n_experiments()), (16, 16, 256));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let chan = random_cp_map(2, true, &mut rng);
        let r = plan.characterize(&chan).unwrap();
        assert!(max_abs_diff(r.chi.matrix(), chi_from_kraus(&chan).matrix()) < 1e-9);
    }

    #[test]
    fn register_size_limits() {
        assert!(SqptPlan::new(0).is_err());
        assert!(SqptPlan::new(3).is_err());
    }
}
