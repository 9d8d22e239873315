//! Entangled inputs, stabilizer/normalizer measurements, and reconstruction
//! of the process matrix from their statistics.

mod closed_form;
mod config;
mod inversion;

pub use closed_form::{
    closed_form_chi, frame_permutation, map_frame, reconstruct_coherence, reconstruct_population, RotatedCoherence,
};
pub use config::{
    Amplitudes, Configuration, MeasurementProjector, OutcomeDistribution, PairOutcome, Setting, DEGENERACY_TOL,
    MAX_QUBITS,
};
pub use inversion::{
    characterize, design_matrix, population_design, stacked_design_matrix, Characterizer, DesignDiagnostics,
    ReconstructionResult, RANK_TOL,
};
