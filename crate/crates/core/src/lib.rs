//! Numerical laboratory for degenerate (binary-outcome) dispersive readout of
//! a superconducting qutrit: dispersive-shift engineering, sweet-spot search,
//! measurement back-action, tomographic reconstruction and measurement
//! compatibility.
//!
//! All frequencies are ordinary frequencies in MHz and all times are in µs.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod contextuality;
pub mod control;
pub mod device;
pub mod error;
pub mod harness;
pub mod noise;
pub mod numerics;
pub mod qcore;
pub mod readout;
pub mod tomography;

pub use error::{Error, Result};
