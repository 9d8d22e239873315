//! Quantum dynamical maps in Kraus, process-matrix (χ) and Choi form,
//! with conversions, validation, composition and named noise processes.

mod kraus;
mod process;
mod random;
mod spec;

pub use kraus::{action_distance, compose, KrausSet, COMPLETENESS_TOL};
pub use process::{
    chi_from_kraus, kraus_from_chi, tp_constraint_matrix, validate, ProcessMatrix, ValidationReport, CHI_PSD_FLOOR,
    CHI_TOL,
};
pub use random::{choi_from_kraus, kraus_from_choi, random_cp_map};
pub use spec::ChannelSpec;
