//! Eigen-decomposition, matrix functions and a small real SVD.
//!
//! Hermitian eigenproblems use cyclic complex Jacobi rotations. The matrices
//! in this crate are small (≤ 64), where Jacobi is accurate to a few ulps of
//! the matrix norm.

use num_complex::Complex64 as C64;

use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Eigenvalues below this are treated as an invalid (non-PSD) input by
/// [`sqrt_psd`]; values between it and zero are clipped.
pub const NEGATIVE_EIGENVALUE_THRESHOLD: f64 = 1e-6;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V diag(f(λ)) V†`
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }
}

/// Hermiticity tolerance scaled by the matrix magnitude.
fn hermitian_tolerance(m: &ComplexMatrix) -> f64 {
    1e-10 * m.max_abs().max(1.0)
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigen-decomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let deviation = m.hermitian_deviation();
    if deviation > hermitian_tolerance(m) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence("Jacobi eigen-solver exceeded sweep limit".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// One Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let n = a.rows();
    let phase = C64::from_polar(1.0, -apq.arg());
    let theta = 0.5 * (2.0 * mag).atan2(a[(q, q)].re - a[(p, p)].re);
    let (s, c) = theta.sin_cos();
    // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane.
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = phase * (-s);
    let u_qq = phase * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Principal square root of a positive-semidefinite matrix. Eigenvalues in
/// `[-1e-6, 0)` are clipped to zero; anything more negative is an error.
pub fn sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(m)?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min < -NEGATIVE_EIGENVALUE_THRESHOLD {
        return Err(Error::NotPositive { eigenvalue: min });
    }
    let floor = noise_floor(&eig.values);
    Ok(eig.map(|x| if x > floor { x.sqrt() } else { 0.0 }))
}

/// Eigenvalues below this magnitude are indistinguishable from rounding
/// noise of the decomposition.
pub fn noise_floor(values: &[f64]) -> f64 {
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    64.0 * f64::EPSILON * max
}

/// Euclidean projection onto the PSD cone (negative eigenvalues set to zero).
pub fn project_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(&m.hermitian_part())?.map(|x| x.max(0.0)))
}

/// Euclidean projection of `v` onto the simplex `{x ≥ 0, Σx = total}`.
pub fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        cumulative += x;
        let candidate = (cumulative - total) / (k + 1) as f64;
        if x - candidate > 0.0 {
            shift = candidate;
        }
    }
    v.iter().map(|x| (x - shift).max(0.0)).collect()
}

/// Matrix exponential of a general complex matrix by scaling and squaring
/// with a truncated Taylor series.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.rows();
    let norm1 = (0..n).map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm1 > 0.25 { (norm1 / 0.25).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale_real(0.5f64.powi(squarings));

    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=30 {
        term = (&term * &scaled).scale_real(1.0 / k as f64);
        result += &term;
        if term.max_abs() < 1e-18 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Singular value decomposition of a real `m × n` matrix by one-sided
/// (Hestenes) Jacobi. Singular values are returned in descending order.
#[derive(Debug, Clone)]
pub struct RealSvd {
    pub singular_values: Vec<f64>,
    /// Left singular vectors as columns (`m` entries each); zero for zero
    /// singular values.
    pub u: Vec<Vec<f64>>,
    /// Right singular vectors as columns (`n` entries each).
    pub v: Vec<Vec<f64>>,
}

impl RealSvd {
    /// Number of singular values above `rel_tol · σ_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values.iter().filter(|&&s| s > rel_tol * smax).count()
    }

    /// Right singular vectors spanning the numerical null space.
    pub fn null_space(&self, rel_tol: f64) -> Vec<Vec<f64>> {
        let r = self.rank(rel_tol);
        self.v[r..].to_vec()
    }

    /// Minimum-norm least-squares solution of `A x = b`.
    pub fn solve(&self, b: &[f64], rel_tol: f64) -> Vec<f64> {
        let r = self.rank(rel_tol);
        let n = self.v.first().map_or(0, Vec::len);
        let mut x = vec![0.0; n];
        for k in 0..r {
            let coef: f64 = self.u[k].iter().zip(b).map(|(u, b)| u * b).sum::<f64>() / self.singular_values[k];
            for (xi, vi) in x.iter_mut().zip(&self.v[k]) {
                *xi += coef * vi;
            }
        }
        x
    }
}

/// `rows` is the matrix in row-major nested form.
pub fn svd_real(rows: &[Vec<f64>]) -> RealSvd {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    // Work on columns.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| f64::from(u8::from(i == j))).collect()).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let (xp, xq) = (cols[p][k], cols[q][k]);
                    cols[p][k] = c * xp - s * xq;
                    cols[q][k] = s * xp + c * xq;
                }
                for k in 0..n {
                    let (xp, xq) = (v[p][k], v[q][k]);
                    v[p][k] = c * xp - s * xq;
                    v[q][k] = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut triples: Vec<(f64, Vec<f64>, Vec<f64>)> = cols
        .into_iter()
        .zip(v)
        .map(|(c, vj)| {
            let s = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            let u = if s > 0.0 { c.iter().map(|x| x / s).collect() } else { vec![0.0; m] };
            (s, u, vj)
        })
        .collect();
    triples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out = RealSvd { singular_values: Vec::new(), u: Vec::new(), v: Vec::new() };
    for (s, u, vj) in triples {
        out.singular_values.push(s);
        out.u.push(u);
        out.v.push(vj);
    }
    out
}

/// Unitarity deviation `max |U†U − I|`.
pub fn unitarity_deviation(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(u.rows()))
}

/// Completes `v` (unit norm) to a unitary whose first column is `v`, by
/// Gram-Schmidt against the standard basis.
pub fn complete_to_unitary(v: &[C64]) -> ComplexMatrix {
    let d = v.len();
    let mut columns: Vec<Vec<C64>> = vec![v.to_vec()];
    for k in 0..d {
        if columns.len() == d {
            break;
        }
        let mut e: Vec<C64> = (0..d).map(|i| if i == k { ONE } else { ZERO }).collect();
        for c in &columns {
            let overlap: C64 = c.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
            for (ei, ci) in e.iter_mut().zip(c) {
                *ei -= overlap * ci;
            }
        }
        let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            columns.push(e.iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_columns(&columns)
}
