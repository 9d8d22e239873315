//! Simulation of entanglement-assisted process characterization.
//!
//! A primary register is entangled with an ancilla, the unknown map acts on
//! the primary qubits only, and Bell-type stabilizer/normalizer measurements
//! on the joint output determine the process matrix χ without any state
//! tomography. The crate also provides a standard process tomography
//! baseline, finite-shot sampling, and joint T1/T2 estimation from a single
//! Bell-type measurement.

// `!(x > 0.0)` checks below are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod channels;
pub mod cli;
pub mod dcqd;
pub mod qcore;
pub mod relax;
pub mod report;
pub mod sampling;
pub mod sqpt;

pub use error::{DcqdError, Result};
