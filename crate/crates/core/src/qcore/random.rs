//! Seeded random matrices and states (Haar measure where it matters).

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state of dimension `d`.
pub fn haar_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
        if let Some(n) = super::matrix::normalized(&v) {
            return n;
        }
    }
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE up to scale).
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian(rng));
    g.hermitian_part()
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    random_isometry(d, d, rng)
}

/// Random isometry `V: C^cols → C^rows` (`rows ≥ cols`), `V†V = I`.
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| gaussian(rng)).collect();
        for c in &columns {
            let overlap = super::matrix::inner(c, &v);
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= overlap * ci;
            }
        }
        if let Some(n) = super::matrix::normalized(&v) {
            columns.push(n);
        }
    }
    ComplexMatrix::from_columns(&columns)
}

/// Random mixed state of full rank from a Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    m.scale_real(1.0 / tr)
}

/// Kraus operators of a random CPTP map on dimension `d` with `k` operators,
/// cut from a random isometry `C^d → C^(k·d)`.
pub fn random_kraus<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let v = random_isometry(k * d, d, rng);
    (0..k).map(|op| ComplexMatrix::from_fn(d, d, |i, j| v[(op * d + i, j)])).collect()
}
