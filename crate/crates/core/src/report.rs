//! Serializable reports: χ matrices split into real and imaginary parts,
//! and the resource comparison between characterization schemes.

use serde::{Deserialize, Serialize};

use crate::channels::ProcessMatrix;
use crate::error::{DcqdError, Result};
use crate::qcore::{c, CMatrix};

/// χ with real and imaginary parts stored separately and the Pauli-string
/// legend for its rows and columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiReport {
    pub n: usize,
    pub legend: Vec<String>,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
}

impl ChiReport {
    pub fn from_process(chi: &ProcessMatrix) -> Self {
        let m = chi.matrix();
        let rows = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect()
        };
        Self {
            n: chi.n_qubits(),
            legend: chi.labels(),
            real: rows(|z| z.re),
            imag: rows(|z| z.im),
        }
    }

    pub fn to_process(&self) -> Result<ProcessMatrix> {
        let size = 1usize << (2 * self.n);
        let shaped = |m: &Vec<Vec<f64>>| m.len() == size && m.iter().all(|r| r.len() == size);
        if !shaped(&self.real) || !shaped(&self.imag) {
            return Err(DcqdError::parse("chi", format!("expected {size}x{size} real and imag parts")));
        }
        ProcessMatrix::new(
            self.n,
            CMatrix::from_fn(size, size, |i, j| c(self.real[i][j], self.imag[i][j])),
        )
    }

    /// One `row,col,re,im` line per entry, with the Pauli labels.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,re,im\n");
        for (i, r) in self.legend.iter().enumerate() {
            for (j, col) in self.legend.iter().enumerate() {
                out.push_str(&format!("{r},{col},{},{}\n", self.real[i][j], self.imag[i][j]));
            }
        }
        out
    }
}

/// Characterization scheme in the resource table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "SQPT")]
    Sqpt,
    #[serde(rename = "AAPT")]
    Aapt,
    #[serde(rename = "DCQD")]
    Dcqd,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Sqpt, Scheme::Aapt, Scheme::Dcqd];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Sqpt => "SQPT",
            Scheme::Aapt => "AAPT",
            Scheme::Dcqd => "DCQD",
        }
    }
}

/// Hilbert-space dimension, distinct inputs, measurement settings per input,
/// and total experimental configurations for `n` qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceRow {
    pub n: u32,
    pub scheme: Scheme,
    pub dim_h: u64,
    pub n_in: u64,
    pub n_m: u64,
    pub n_exp: u64,
}

fn pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp)
        .ok_or_else(|| DcqdError::InvalidConfiguration(format!("{base}^{exp} overflows 64 bits")))
}

impl ResourceRow {
    /// SQPT: (2ⁿ, 4ⁿ, 4ⁿ, 16ⁿ); non-separable AAPT: (4ⁿ, 1, 4ⁿ+1, 4ⁿ+1);
    /// DCQD: (4ⁿ, 4ⁿ, 1, 4ⁿ).
    pub fn new(scheme: Scheme, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(DcqdError::InvalidConfiguration("n must be at least 1".into()));
        }
        let four = pow(4, n)?;
        let (dim_h, n_in, n_m, n_exp) = match scheme {
            Scheme::Sqpt => (pow(2, n)?, four, four, pow(16, n)?),
            Scheme::Aapt => {
                let m = four
                    .checked_add(1)
                    .ok_or_else(|| DcqdError::InvalidConfiguration("count overflows 64 bits".into()))?;
                (four, 1, m, m)
            }
            Scheme::Dcqd => (four, four, 1, four),
        };
        Ok(Self {
            n,
            scheme,
            dim_h,
            n_in,
            n_m,
            n_exp,
        })
    }
}

/// Rows for every scheme and every `n` in the range.
pub fn resource_table(ns: impl IntoIterator<Item = u32>) -> Result<Vec<ResourceRow>> {
    let mut rows = Vec::new();
    for n in ns {
        for scheme in Scheme::ALL {
            rows.push(ResourceRow::new(scheme, n)?);
        }
    }
    Ok(rows)
}

pub fn resource_csv(rows: &[ResourceRow]) -> String {
    let mut out = String::from("n,scheme,dim_h,n_in,n_m,n_exp\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{},{}\n", r.n, r.scheme.label(), r.dim_h, r.n_in, r.n_m, r.n_exp));
    }
    out
}

/// Fixed-width text rendering.
pub fn resource_text(rows: &[ResourceRow]) -> String {
    let mut out = format!("{:>3} {:<6} {:>12} {:>12} {:>12} {:>14}\n", "n", "scheme", "dim(H)", "N_in", "N_m", "N_exp");
    for r in rows {
        out.push_str(&format!(
            "{:>3} {:<6} {:>12} {:>12} {:>12} {:>14}\n",
            r.n,
            r.scheme.label(),
            r.dim_h,
            r.n_in,
            r.n_m,
            r.n_exp
        ));
    }
    out
}

/// Fixed-width resource table for every scheme over `ns`.
pub fn emit_resource_table(ns: impl IntoIterator<Item = u32>) -> Result<String> {
    Ok(resource_text(&resource_table(ns)?))
}
