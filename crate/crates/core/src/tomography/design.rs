//! Measurement design matrices and tomographic completeness.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::basis::OperatorBasis;
use crate::control::{PulseSequence, Rotation};
use crate::error::{Error, Result};
use crate::qcore::linalg::svd_real;
use crate::qcore::{ComplexMatrix, Observable, UnitaryMatrix};

/// Relative singular-value threshold for the numerical rank.
pub const RANK_TOL: f64 = 1e-8;

/// What the readout reports after each tomography sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum Measurement {
    /// A single averaged record with expectation `Tr(O ρ)`.
    Observable(Observable),
    /// Discrete outcomes with the given effects, one record per effect.
    Povm(Vec<ComplexMatrix>),
}

impl Measurement {
    /// `A_0 = 2|0⟩⟨0| − I`, blind to the difference between |1⟩ and |2⟩.
    pub fn degenerate_ground() -> Self {
        let p0 = ComplexMatrix::basis_projector(3, 0);
        Measurement::Observable(
            Observable::new(&p0.scale_real(2.0) - &ComplexMatrix::identity(3)).expect("Hermitian by construction"),
        )
    }

    /// The binary POVM `{|0⟩⟨0|, I − |0⟩⟨0|}`.
    pub fn binary_ground() -> Self {
        let p0 = ComplexMatrix::basis_projector(3, 0);
        Measurement::Povm(vec![p0.clone(), &ComplexMatrix::identity(3) - &p0])
    }

    /// The non-degenerate projective measurement in the computational basis.
    pub fn ternary() -> Self {
        Measurement::Povm((0..3).map(|i| ComplexMatrix::basis_projector(3, i)).collect())
    }

    pub fn dim(&self) -> usize {
        match self {
            Measurement::Observable(o) => o.dim(),
            Measurement::Povm(effects) => effects.first().map_or(0, ComplexMatrix::rows),
        }
    }

    fn operators(&self) -> Vec<ComplexMatrix> {
        match self {
            Measurement::Observable(o) => vec![o.matrix().clone()],
            Measurement::Povm(effects) => effects.clone(),
        }
    }

    pub fn is_povm(&self) -> bool {
        matches!(self, Measurement::Povm(_))
    }
}

/// Linear map from a state to the expected records of a tomography run.
///
/// Row `k` holds the real coordinates of the Heisenberg-picture effect
/// `U_s† O U_s` in the operator basis, so the expected record is the dot
/// product of the row with the state's coordinates.
#[derive(Debug, Clone)]
pub struct TomographyDesign {
    labels: Vec<String>,
    unitaries: Vec<UnitaryMatrix>,
    measurement: Measurement,
    basis: OperatorBasis,
    effects: Vec<ComplexMatrix>,
    /// `(setting, outcome)` for each row.
    row_index: Vec<(usize, usize)>,
    rows: Vec<Vec<f64>>,
    rank: usize,
}

/// Result of a completeness check.
#[derive(Debug, Clone)]
pub enum Completeness {
    Complete,
    /// Rank and Hermitian witnesses spanning the unobservable directions.
    Deficient {
        rank: usize,
        witnesses: Vec<ComplexMatrix>,
    },
}

impl Completeness {
    pub fn is_complete(&self) -> bool {
        matches!(self, Completeness::Complete)
    }
}

/// Design for a tomography set. Setting `k` measures along `U_k|0⟩`: the
/// pulses played in front of the readout are the inverse sequence `U_k†`,
/// so the Heisenberg-picture effect is `U_k O U_k†`.
pub fn build_design(set: &[PulseSequence], measurement: Measurement) -> Result<TomographyDesign> {
    let unitaries: Vec<UnitaryMatrix> = set.iter().map(|s| s.inverse().compile()).collect();
    let labels = set.iter().map(ToString::to_string).collect();
    build_design_from_unitaries(&unitaries, labels, measurement)
}

/// Design from the unitaries applied immediately before the readout; row
/// `k` expands `U_k† O U_k`.
pub fn build_design_from_unitaries(
    unitaries: &[UnitaryMatrix],
    labels: Vec<String>,
    measurement: Measurement,
) -> Result<TomographyDesign> {
    if unitaries.is_empty() {
        return Err(Error::InvalidParameter("tomography set is empty".into()));
    }
    if labels.len() != unitaries.len() {
        return Err(Error::DimensionMismatch(format!("{} labels for {} settings", labels.len(), unitaries.len())));
    }
    let d = measurement.dim();
    if let Some(u) = unitaries.iter().find(|u| u.dim() != d) {
        return Err(Error::DimensionMismatch(format!("setting of dimension {} with a {d}-level measurement", u.dim())));
    }
    let basis = OperatorBasis::gell_mann(d);
    let operators = measurement.operators();
    let mut effects = Vec::new();
    let mut row_index = Vec::new();
    let mut rows = Vec::new();
    for (s, u) in unitaries.iter().enumerate() {
        for (o, op) in operators.iter().enumerate() {
            let effect = (&(&u.matrix().adjoint() * op) * u.matrix()).hermitian_part();
            rows.push(basis.real_coordinates(&effect));
            effects.push(effect);
            row_index.push((s, o));
        }
    }
    let rank = svd_real(&rows).rank(RANK_TOL);
    Ok(TomographyDesign { labels, unitaries: unitaries.to_vec(), measurement, basis, effects, row_index, rows, rank })
}

impl TomographyDesign {
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_settings(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Unitary applied immediately before the readout in each setting.
    pub fn unitaries(&self) -> &[UnitaryMatrix] {
        &self.unitaries
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    /// Heisenberg-picture effect of each row.
    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn row_index(&self) -> &[(usize, usize)] {
        &self.row_index
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Keeps only the settings whose indices are listed.
    pub fn restrict(&self, settings: &[usize]) -> Result<TomographyDesign> {
        let mut keep = Vec::new();
        for &s in settings {
            if s >= self.n_settings() {
                return Err(Error::InvalidParameter(format!("setting {s} out of range")));
            }
            keep.extend(self.row_index.iter().enumerate().filter(|(_, &(ss, _))| ss == s).map(|(k, _)| k));
        }
        let rows: Vec<Vec<f64>> = keep.iter().map(|&k| self.rows[k].clone()).collect();
        let rank = svd_real(&rows).rank(RANK_TOL);
        Ok(TomographyDesign {
            labels: settings.iter().map(|&s| self.labels[s].clone()).collect(),
            unitaries: settings.iter().map(|&s| self.unitaries[s].clone()).collect(),
            measurement: self.measurement.clone(),
            basis: self.basis.clone(),
            effects: keep.iter().map(|&k| self.effects[k].clone()).collect(),
            row_index: keep.iter().map(|&k| self.row_index[k]).collect(),
            rows,
            rank,
        })
    }

    /// Expected record of every row for a state (or any Hermitian matrix).
    pub fn predict(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.effects.iter().map(|e| e.hs_inner(rho).re).collect()
    }

    pub fn completeness(&self) -> Completeness {
        completeness(self)
    }

    /// Design matrix as CSV, one row per record.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("setting,outcome,label");
        for m in 0..self.basis.len() {
            let _ = write!(out, ",b{m}");
        }
        out.push('\n');
        for (row, &(s, o)) in self.rows.iter().zip(&self.row_index) {
            let _ = write!(out, "{s},{o},\"{}\"", self.labels[s]);
            for x in row {
                let _ = write!(out, ",{x:.15e}");
            }
            out.push('\n');
        }
        out
    }
}

/// Rank test with a relative singular-value threshold; a deficient design
/// comes with witnesses spanning the unobservable subspace.
pub fn completeness(design: &TomographyDesign) -> Completeness {
    let n = design.basis.len();
    let svd = svd_real(&design.rows);
    let rank = svd.rank(RANK_TOL);
    if rank == n {
        return Completeness::Complete;
    }
    let witnesses = svd.null_space(RANK_TOL).iter().map(|v| design.basis.from_real_coordinates(v)).collect();
    Completeness::Deficient { rank, witnesses }
}

/// Six settings that, with a three-outcome computational-basis readout,
/// determine an arbitrary qutrit state.
pub fn standard_ternary_set() -> Vec<PulseSequence> {
    use std::f64::consts::PI;
    let half = PI / 2.0;
    vec![
        PulseSequence::identity(),
        PulseSequence::from_written_order(vec![Rotation::x01(half)]),
        PulseSequence::from_written_order(vec![Rotation::y01(half)]),
        PulseSequence::from_written_order(vec![Rotation::x12(half)]),
        PulseSequence::from_written_order(vec![Rotation::y12(half)]),
        PulseSequence::from_written_order(vec![Rotation::x01(half), Rotation::y12(half), Rotation::y01(half)]),
    ]
}

/// Signal levels for the two outcome groups of a binary readout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalLevels {
    pub ground: f64,
    pub excited: f64,
}

impl SignalLevels {
    /// Linear least-squares fit of `y = ground·p + excited·(1 − p)` to
    /// pairs `(p, y)` of known ground-state populations and raw records.
    pub fn fit(references: &[(f64, f64)]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = references.iter().map(|&(p, _)| vec![p, 1.0 - p]).collect();
        let y: Vec<f64> = references.iter().map(|&(_, y)| y).collect();
        let svd = svd_real(&rows);
        if svd.rank(1e-10) < 2 {
            return Err(Error::Singular("signal levels need references with two distinct populations".into()));
        }
        let x = svd.solve(&y, 1e-10);
        Ok(Self { ground: x[0], excited: x[1] })
    }

    pub fn contrast(&self) -> f64 {
        self.ground - self.excited
    }

    /// Raw record converted to the `A_0 = 2|0⟩⟨0| − I` scale.
    pub fn to_observable(&self, record: f64) -> Result<f64> {
        let c = self.contrast();
        if c.abs() < 1e-12 {
            return Err(Error::Singular("zero readout contrast".into()));
        }
        Ok(2.0 * (record - self.excited) / c - 1.0)
    }
}
