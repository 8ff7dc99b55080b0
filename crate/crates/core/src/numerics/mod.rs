//! Scalar root finding and small nonlinear least-squares fits.

pub mod fit;
pub mod roots;

pub use fit::{levenberg_marquardt, FitResult};
pub use roots::{bisect_count, brent};
