//! State and process tomography: design matrices, completeness,
//! maximum-likelihood reconstruction and process matrices.

pub mod basis;
pub mod design;
pub mod mle;
pub mod process;

pub use basis::OperatorBasis;
pub use design::{
    build_design, build_design_from_unitaries, completeness, standard_ternary_set, Completeness, Measurement,
    SignalLevels, TomographyDesign,
};
pub use mle::{linear_inversion, mle_state, mle_state_with, project_density, Likelihood, MleOptions, MleReport, Shots};
pub use process::{
    ideal_process_matrix, mle_process, mle_process_with, process_fidelity, project_cptp, ProcessData, ProcessMatrix,
};
