//! Qutrit rotations, pulse sequences and the standard preparation and
//! tomography pulse sets.

pub mod rotation;
pub mod sequence;

pub use rotation::{Axis, Rotation, Subspace};
pub use sequence::{
    projection_procedure, table1_preparation_states, table1_tomography_set, ProjectionProcedure, PulseSequence,
};
