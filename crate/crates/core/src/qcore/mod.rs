//! Dimension-generic complex linear algebra and quantum-information
//! primitives.

pub mod channel;
pub mod linalg;
pub mod matrix;
pub mod random;
pub mod state;

pub use channel::{apply_channel, KrausChannel};
pub use linalg::{eig_hermitian, expm, sqrt_psd, HermitianEigen};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64 as C64;
pub use state::{expectation, partial_trace, state_fidelity, tensor, DensityMatrix, Observable, UnitaryMatrix};
