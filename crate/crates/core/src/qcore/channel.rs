//! Kraus channels, superoperators and Choi matrices.
//!
//! Conventions: superoperators act on column-stacked vectorizations,
//! `vec(K X K†) = (conj(K) ⊗ K) vec(X)`. The Choi matrix is
//! `J = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)` with the input index as the slow one.

use num_complex::Complex64 as C64;

use super::linalg::eig_hermitian;
use super::matrix::ComplexMatrix;
use super::state::{DensityMatrix, UnitaryMatrix};
use crate::error::{Error, Result};

pub const TP_TOL: f64 = 1e-9;
pub const CP_TOL: f64 = 1e-9;

/// A trace-preserving quantum channel in Kraus form, optionally carrying one
/// outcome label per Kraus operator (operators sharing a label form one
/// outcome group).
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<ComplexMatrix>,
    labels: Option<Vec<f64>>,
}

impl KrausChannel {
    pub fn new(ops: Vec<ComplexMatrix>, labels: Option<Vec<f64>>) -> Result<Self> {
        let first =
            ops.first().ok_or_else(|| Error::InvalidParameter("channel needs at least one Kraus operator".into()))?;
        let d = first.cols();
        if ops.iter().any(|k| k.rows() != d || k.cols() != d) {
            return Err(Error::DimensionMismatch("Kraus operators must all be d x d".into()));
        }
        if let Some(l) = &labels {
            if l.len() != ops.len() {
                return Err(Error::DimensionMismatch(format!("{} labels for {} Kraus operators", l.len(), ops.len())));
            }
        }
        let ch = Self { ops, labels };
        let deviation = ch.tp_deviation();
        if deviation > TP_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self { ops: vec![ComplexMatrix::identity(d)], labels: None }
    }

    pub fn unitary(u: &UnitaryMatrix) -> Self {
        Self { ops: vec![u.matrix().clone()], labels: None }
    }

    /// Complete projective measurement in the computational basis.
    pub fn full_dephasing(d: usize) -> Self {
        Self { ops: (0..d).map(|i| ComplexMatrix::basis_projector(d, i)).collect(), labels: None }
    }

    pub fn dim(&self) -> usize {
        self.ops[0].rows()
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn labels(&self) -> Option<&[f64]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<f64>) -> Result<Self> {
        if labels.len() != self.ops.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} Kraus operators",
                labels.len(),
                self.ops.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// `max |Σ K†K − I|`
    pub fn tp_deviation(&self) -> f64 {
        let d = self.dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in &self.ops {
            sum += &(&k.adjoint() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }

    /// `Σ K X K†` on an arbitrary operator.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for k in &self.ops {
            out += &k.sandwich(x);
        }
        out
    }

    /// Heisenberg-picture action `Σ K† X K`.
    pub fn adjoint_apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(x.rows(), x.cols());
        for k in &self.ops {
            out += &(&(&k.adjoint() * x) * k);
        }
        out
    }

    /// Distinct outcome labels in order of first appearance, each with the
    /// indices of its Kraus operators.
    pub fn outcome_groups(&self) -> Option<Vec<(f64, Vec<usize>)>> {
        let labels = self.labels.as_ref()?;
        let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            match groups.iter_mut().find(|(g, _)| *g == l) {
                Some((_, idx)) => idx.push(i),
                None => groups.push((l, vec![i])),
            }
        }
        Some(groups)
    }

    /// Unnormalized post-measurement operator `Σ_{k ∈ group} K ρ K†`.
    pub fn branch(&self, rho: &ComplexMatrix, indices: &[usize]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
        for &k in indices {
            out += &self.ops[k].sandwich(rho);
        }
        out
    }

    /// `Σ conj(K) ⊗ K`
    pub fn superoperator(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut s = ComplexMatrix::zeros(d * d, d * d);
        for k in &self.ops {
            s += &k.conj().kron(k);
        }
        s
    }

    pub fn choi(&self) -> ComplexMatrix {
        superoperator_to_choi(&self.superoperator())
    }

    /// Minimal Kraus form recovered from a Choi matrix. Fails if the Choi
    /// matrix has an eigenvalue below `-1e-9` or the map is not TP.
    pub fn from_choi(choi: &ComplexMatrix) -> Result<Self> {
        let d2 = choi.rows();
        let d = (d2 as f64).sqrt().round() as usize;
        if d * d != d2 || !choi.is_square() {
            return Err(Error::DimensionMismatch("Choi matrix must be d² x d²".into()));
        }
        let eig = eig_hermitian(&choi.hermitian_part())?;
        let min = eig.values[0];
        let scale = eig.values.last().copied().unwrap_or(1.0).abs().max(1.0);
        if min < -CP_TOL * scale {
            return Err(Error::NotCompletelyPositive { eigenvalue: min });
        }
        let cutoff = 1e-14 * scale;
        let mut ops = Vec::new();
        for (k, &lam) in eig.values.iter().enumerate().rev() {
            if lam <= cutoff {
                continue;
            }
            let amp = lam.sqrt();
            let v = eig.vector(k);
            ops.push(ComplexMatrix::from_fn(d, d, |a, i| v[i * d + a] * amp));
        }
        if ops.is_empty() {
            return Err(Error::NotTracePreserving { deviation: 1.0 });
        }
        Self::new(ops, None)
    }

    pub fn from_superoperator(s: &ComplexMatrix) -> Result<Self> {
        Self::from_choi(&superoperator_to_choi(s))
    }

    /// `after ∘ self`, compressed to at most d² Kraus operators. Labels are
    /// dropped.
    pub fn then(&self, after: &KrausChannel) -> Result<Self> {
        if self.dim() != after.dim() {
            return Err(Error::DimensionMismatch("cannot compose channels of different dimension".into()));
        }
        let s = &after.superoperator() * &self.superoperator();
        Self::from_superoperator(&s)
    }

    /// `V K U` for every Kraus operator: `pre` is applied before the channel
    /// and `post` after it. Labels are kept.
    pub fn conjugated(&self, pre: &UnitaryMatrix, post: &UnitaryMatrix) -> Result<Self> {
        if pre.dim() != self.dim() || post.dim() != self.dim() {
            return Err(Error::DimensionMismatch("conjugating unitaries must match channel dimension".into()));
        }
        let ops = self.ops.iter().map(|k| &(post.matrix() * k) * pre.matrix()).collect();
        Self::new(ops, self.labels.clone())
    }
}

/// `ρ_a = Σ K ρ_b K†`, revalidated as a density matrix.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if ch.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "channel on dim {} applied to state of dim {}",
            ch.dim(),
            rho.dim()
        )));
    }
    let deviation = ch.tp_deviation();
    if deviation > TP_TOL {
        return Err(Error::NotTracePreserving { deviation });
    }
    DensityMatrix::new(ch.apply_operator(rho.matrix()).hermitian_part())
}

pub fn superoperator_to_choi(s: &ComplexMatrix) -> ComplexMatrix {
    let d2 = s.rows();
    let d = (d2 as f64).sqrt().round() as usize;
    let mut j = ComplexMatrix::zeros(d2, d2);
    for i in 0..d {
        for jj in 0..d {
            for a in 0..d {
                for b in 0..d {
                    j[(i * d + a, jj * d + b)] = s[(b * d + a, jj * d + i)];
                }
            }
        }
    }
    j
}

pub fn choi_to_superoperator(j: &ComplexMatrix) -> ComplexMatrix {
    let d2 = j.rows();
    let d = (d2 as f64).sqrt().round() as usize;
    let mut s = ComplexMatrix::zeros(d2, d2);
    for i in 0..d {
        for jj in 0..d {
            for a in 0..d {
                for b in 0..d {
                    s[(b * d + a, jj * d + i)] = j[(i * d + a, jj * d + b)];
                }
            }
        }
    }
    s
}

/// Applies a column-stacked superoperator to a `d × d` operator.
pub fn apply_superoperator(s: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let d = x.rows();
    ComplexMatrix::unvec_columns(&s.mul_vec(&x.vec_columns()), d, d)
}

/// Smallest eigenvalue of the Choi matrix of `s` (≥ 0 iff CP).
pub fn choi_min_eigenvalue(s: &ComplexMatrix) -> Result<f64> {
    Ok(eig_hermitian(&superoperator_to_choi(s).hermitian_part())?.values[0])
}

/// Schur-multiplier channel `ρ_ij → M_ij ρ_ij` for a PSD matrix `M` with unit
/// diagonal, in Kraus form `K_k = diag(√λ_k v_k)`.
pub fn schur_channel(m: &ComplexMatrix) -> Result<KrausChannel> {
    let eig = eig_hermitian(&m.hermitian_part())?;
    if eig.values[0] < -CP_TOL {
        return Err(Error::NotCompletelyPositive { eigenvalue: eig.values[0] });
    }
    let mut ops = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate().rev() {
        if lam <= 1e-15 {
            continue;
        }
        let v = eig.vector(k);
        let entries: Vec<C64> = v.iter().map(|z| z * lam.sqrt()).collect();
        ops.push(ComplexMatrix::diag(&entries));
    }
    KrausChannel::new(ops, None)
}
