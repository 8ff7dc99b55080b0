//! Density matrices, unitaries, observables and the quantities built on them.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::linalg::{eig_hermitian, noise_floor, sqrt_psd, unitarity_deviation};
use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIGENVALUE_TOL: f64 = 1e-10;
pub const UNITARY_TOL: f64 = 1e-10;

/// A valid quantum state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `m` against the state invariants. Hermiticity is checked
    /// relative to 1e-12 and the stored matrix is the exact Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let deviation = m.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {deviation:.3e})")));
        }
        let m = m.hermitian_part();
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = eig_hermitian(&m)?.values[0];
        if min < -EIGENVALUE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { matrix: m })
    }

    /// `|ψ⟩⟨ψ|` for a ket normalized internally.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        let v = super::matrix::normalized(ket).ok_or_else(|| Error::InvalidState("zero state vector".into()))?;
        Self::new(ComplexMatrix::outer(&v, &v))
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        Self { matrix: ComplexMatrix::basis_projector(dim, i) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `U ρ U†`
    pub fn evolve(&self, u: &UnitaryMatrix) -> Result<Self> {
        check_dims(self.dim(), u.dim())?;
        Self::new(u.matrix().sandwich(&self.matrix).hermitian_part())
    }
}

impl TryFrom<ComplexMatrix> for DensityMatrix {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<DensityMatrix> for ComplexMatrix {
    fn from(d: DensityMatrix) -> Self {
        d.matrix
    }
}

/// A unitary matrix, `U†U = I` to 1e-10.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
}

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let deviation = unitarity_deviation(&m);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix: m })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: self.matrix.adjoint() }
    }

    /// `self · rhs` (apply `rhs` first).
    pub fn then_after(&self, rhs: &Self) -> Self {
        Self { matrix: &self.matrix * &rhs.matrix }
    }

    pub fn apply(&self, ket: &[C64]) -> Vec<C64> {
        self.matrix.mul_vec(ket)
    }
}

/// A Hermitian observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("observable must be square".into()));
        }
        let deviation = m.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix: m.hermitian_part() })
    }

    /// `2|v⟩⟨v| − I`
    pub fn binary(v: &[C64]) -> Result<Self> {
        let v = super::matrix::normalized(v).ok_or_else(|| Error::InvalidParameter("zero ray".into()))?;
        let p = ComplexMatrix::outer(&v, &v);
        Self::new(&p.scale_real(2.0) - &ComplexMatrix::identity(v.len()))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `U† A U`: the observable measured when `U` is applied before `A`.
    pub fn heisenberg(&self, u: &UnitaryMatrix) -> Self {
        let m = &(&u.matrix().adjoint() * &self.matrix) * u.matrix();
        Self { matrix: m.hermitian_part() }
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(format!("dimensions {a} and {b} differ")));
    }
    Ok(())
}

/// Uhlmann fidelity `(Tr √(√a b √a))²`, clamped to `[0, 1]`.
pub fn state_fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(psd_fidelity(a.matrix(), b.matrix())?.clamp(0.0, 1.0))
}

/// `(Tr √(√a b √a))²` for positive semidefinite `a`, `b` of any trace.
pub fn psd_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} and {}x{}", a.rows(), a.cols(), b.rows(), b.cols())));
    }
    let sa = sqrt_psd(a)?;
    let inner = (&(&sa * b) * &sa).hermitian_part();
    let eig = eig_hermitian(&inner)?;
    let floor = noise_floor(&eig.values);
    let tr: f64 = eig.values.iter().filter(|&&x| x > floor).map(|&x| x.sqrt()).sum();
    Ok(tr * tr)
}

/// `Tr(A ρ)`
pub fn expectation(a: &Observable, rho: &DensityMatrix) -> Result<f64> {
    check_dims(a.dim(), rho.dim())?;
    let value = (a.matrix() * rho.matrix()).trace();
    if value.im.abs() > 1e-10 {
        return Err(Error::InvalidState(format!("expectation has imaginary part {:.3e}", value.im)));
    }
    Ok(value.re)
}

pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Traces out subsystem `which` of a state on `dims[0] ⊗ dims[1] ⊗ …`.
pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], which: usize) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::DimensionMismatch(format!("subsystem dims {dims:?} do not multiply to {}", rho.dim())));
    }
    if which >= dims.len() {
        return Err(Error::DimensionMismatch(format!("subsystem index {which} out of range")));
    }
    let inner: usize = dims[which + 1..].iter().product();
    let traced = dims[which];
    let outer: usize = dims[..which].iter().product();
    let kept = outer * inner;
    let m = rho.matrix();
    let mut out = ComplexMatrix::zeros(kept, kept);
    for o1 in 0..outer {
        for i1 in 0..inner {
            for o2 in 0..outer {
                for i2 in 0..inner {
                    let mut acc = ZERO;
                    for t in 0..traced {
                        let r = (o1 * traced + t) * inner + i1;
                        let c = (o2 * traced + t) * inner + i2;
                        acc += m[(r, c)];
                    }
                    out[(o1 * inner + i1, o2 * inner + i2)] = acc;
                }
            }
        }
    }
    DensityMatrix::new(out)
}

/// Fidelity of two pure states up to global phase, `|⟨a|b⟩|²` for unit kets.
pub fn ket_overlap(a: &[C64], b: &[C64]) -> f64 {
    super::matrix::inner(a, b).norm_sqr()
}
