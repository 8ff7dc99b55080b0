//! Transmon and cavity physics: level structure, generalized Jaynes-Cummings
//! Hamiltonian, dispersive shifts and the χ12 sweet spot.

pub mod dispersive;
pub mod jc;
pub mod transmon;

pub use dispersive::{chi12_closed_form, dispersive_shifts_2nd_order, DispersiveShifts};
pub use jc::{
    dressed_cavity_pull, exact_chi12, find_sweet_spot, jc_hamiltonian, manifold_pulls, DeviceParams, DressedPulls,
    LevelModel, SweetSpot, SweetSpotMode,
};
pub use transmon::{fit_transmon, transmon_levels, QutritLevels, TransmonSpec};
