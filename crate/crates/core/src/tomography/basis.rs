//! Orthonormal Hermitian operator bases.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::matrix::{ComplexMatrix, I, ONE, ZERO};

/// A list of `d²` Hermitian `d × d` matrices, orthonormal under the
/// Hilbert-Schmidt inner product. Element 0 is `I/√d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorBasis {
    elements: Vec<ComplexMatrix>,
}

impl OperatorBasis {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let d = elements.first().map_or(0, ComplexMatrix::rows);
        if d == 0 || elements.len() != d * d {
            return Err(Error::DimensionMismatch(format!("need d² elements, got {} for d = {d}", elements.len())));
        }
        let basis = Self { elements };
        let deviation = basis.orthonormality_deviation();
        if deviation > 1e-10 {
            return Err(Error::InvalidParameter(format!("basis is not orthonormal (deviation {deviation:.3e})")));
        }
        Ok(basis)
    }

    /// Generalized Gell-Mann matrices scaled by `1/√2`, preceded by `I/√d`.
    ///
    /// For `d = 3` the order is the usual λ1..λ8: for each pair `(j, k)`
    /// with `j < k` in the order (0,1), (0,2), (1,2) the symmetric and
    /// antisymmetric matrices, with the diagonal ones placed as λ3 and λ8.
    pub fn gell_mann(d: usize) -> Self {
        let mut elements = vec![ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt())];
        if d == 3 {
            let sym = |j, k| offdiag(3, j, k, ONE, ONE);
            let anti = |j, k| offdiag(3, j, k, -I, I);
            elements.extend([
                sym(0, 1),
                anti(0, 1),
                diagonal(3, 1),
                sym(0, 2),
                anti(0, 2),
                sym(1, 2),
                anti(1, 2),
                diagonal(3, 2),
            ]);
        } else {
            for k in 1..d {
                for j in 0..k {
                    elements.push(offdiag(d, j, k, ONE, ONE));
                    elements.push(offdiag(d, j, k, -I, I));
                }
                elements.push(diagonal(d, k));
            }
        }
        Self { elements }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn element(&self, m: usize) -> &ComplexMatrix {
        &self.elements[m]
    }

    /// `max |Tr(B_m† B_n) − δ_mn|`
    pub fn orthonormality_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (m, a) in self.elements.iter().enumerate() {
            for (n, b) in self.elements.iter().enumerate() {
                let target = if m == n { ONE } else { ZERO };
                worst = worst.max((a.hs_inner(b) - target).norm());
            }
        }
        worst
    }

    /// Complex coordinates `Tr(B_m† X)`.
    pub fn coordinates(&self, x: &ComplexMatrix) -> Vec<C64> {
        self.elements.iter().map(|b| b.hs_inner(x)).collect()
    }

    /// Real coordinates of a Hermitian matrix.
    pub fn real_coordinates(&self, h: &ComplexMatrix) -> Vec<f64> {
        self.elements.iter().map(|b| b.hs_inner(h).re).collect()
    }

    pub fn from_coordinates(&self, c: &[C64]) -> ComplexMatrix {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (b, &z) in self.elements.iter().zip(c) {
            out += &b.scale(z);
        }
        out
    }

    pub fn from_real_coordinates(&self, r: &[f64]) -> ComplexMatrix {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (b, &x) in self.elements.iter().zip(r) {
            out += &b.scale_real(x);
        }
        out
    }

    /// `W` with column `m` equal to the column-stacked `B_m`, so that a
    /// Choi matrix `J` and the process matrix in this basis are related by
    /// `J = W χ W†`.
    pub fn vectorization_matrix(&self) -> ComplexMatrix {
        let columns: Vec<Vec<C64>> = self.elements.iter().map(ComplexMatrix::vec_columns).collect();
        ComplexMatrix::from_columns(&columns)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len() && self.elements.iter().zip(&other.elements).all(|(a, b)| a.approx_eq(b, tol))
    }
}

fn offdiag(d: usize, j: usize, k: usize, upper: C64, lower: C64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    m[(j, k)] = upper * FRAC_1_SQRT_2;
    m[(k, j)] = lower * FRAC_1_SQRT_2;
    m
}

/// Normalized `diag(1, …, 1, −k, 0, …)` with `k` leading ones.
fn diagonal(d: usize, k: usize) -> ComplexMatrix {
    let scale = 1.0 / ((k * (k + 1)) as f64).sqrt();
    let entries: Vec<f64> = (0..d)
        .map(|i| match i.cmp(&k) {
            std::cmp::Ordering::Less => scale,
            std::cmp::Ordering::Equal => -(k as f64) * scale,
            std::cmp::Ordering::Greater => 0.0,
        })
        .collect();
    ComplexMatrix::real_diag(&entries)
}
