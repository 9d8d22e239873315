use std::fmt;

use serde::{Deserialize, Serialize};

use super::{c, CMatrix, ONE, ZERO};
use crate::error::{DcqdError, Result};

/// Single-qubit Pauli letter. The discriminant is the basis index used
/// throughout: I = 0, X = 1, Y = 2, Z = 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_index(i: u8) -> Option<Pauli> {
        Self::ALL.get(i as usize).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn matrix(self) -> CMatrix {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        CMatrix::from_row_slice(2, 2, &m)
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of Pauli letters, leftmost letter on the most significant
/// qubit. Strings of equal length are ordered lexicographically with
/// I < X < Y < Z, which is the row/column order of every process matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(DcqdError::InvalidState("empty Pauli string".into()));
        }
        Ok(Self { letters })
    }

    pub fn from_indices(indices: &[u8]) -> Result<Self> {
        let letters = indices
            .iter()
            .map(|&i| {
                Pauli::from_index(i)
                    .ok_or_else(|| DcqdError::InvalidState(format!("Pauli index {i} out of range 0..3")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }

    /// The `index`-th string on `n` qubits in lexicographic order.
    pub fn from_index(n: usize, index: usize) -> Self {
        assert!(n > 0 && index < 1 << (2 * n), "index {index} out of range for {n} qubits");
        let letters = (0..n)
            .map(|q| Pauli::ALL[(index >> (2 * (n - 1 - q))) & 3])
            .collect();
        Self { letters }
    }

    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * n)).map(move |i| PauliString::from_index(n, i))
    }

    pub fn index(&self) -> usize {
        self.letters.iter().fold(0, |acc, p| (acc << 2) | p.index())
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn label(&self) -> String {
        self.letters.iter().map(|p| p.letter()).collect()
    }

    pub fn matrix(&self) -> CMatrix {
        pauli_matrix(self)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Dense matrix of a Pauli string, `Y = [[0, -i], [i, 0]]`.
pub fn pauli_matrix(p: &PauliString) -> CMatrix {
    super::tensor_all(p.letters.iter().map(|l| l.matrix()).collect::<Vec<_>>().iter())
}
