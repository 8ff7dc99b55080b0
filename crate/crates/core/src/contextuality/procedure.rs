//! Binary observables and the procedures that realize them.

use num_complex::Complex64 as C64;

use crate::control::projection_procedure;
use crate::error::{Error, Result};
use crate::qcore::matrix::normalized;
use crate::qcore::{ComplexMatrix, KrausChannel, Observable, UnitaryMatrix};
use crate::readout::{ideal_binary_channel, ideal_ternary_channel, EXCITED, GROUND};

/// `A_v = 2|v⟩⟨v| − I` for a ray `v`.
#[derive(Debug, Clone)]
pub struct BinaryObservable {
    ray: Vec<C64>,
    observable: Observable,
}

impl BinaryObservable {
    pub fn new(v: &[C64]) -> Result<Self> {
        let ray = normalized(v).ok_or_else(|| Error::InvalidParameter("zero ray".into()))?;
        let observable = Observable::binary(&ray)?;
        Ok(Self { ray, observable })
    }

    pub fn ray(&self) -> &[C64] {
        &self.ray
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.ray, &self.ray)
    }
}

/// A device measurement of |0⟩ sandwiched between control rotations:
/// `pre` maps the ray onto |0⟩ and `post` maps it back.
#[derive(Debug, Clone)]
pub struct MeasurementProcedure {
    target: BinaryObservable,
    pre: UnitaryMatrix,
    device: KrausChannel,
    post: UnitaryMatrix,
    /// `(label, Kraus indices)` with labels in {+1, −1}.
    groups: Vec<(f64, Vec<usize>)>,
}

impl MeasurementProcedure {
    pub fn new(
        target: BinaryObservable,
        pre: UnitaryMatrix,
        device: KrausChannel,
        post: UnitaryMatrix,
    ) -> Result<Self> {
        let d = device.dim();
        if pre.dim() != d || post.dim() != d || target.ray.len() != d {
            return Err(Error::DimensionMismatch("procedure parts have different dimensions".into()));
        }
        let groups = device
            .outcome_groups()
            .ok_or_else(|| Error::InvalidParameter("device channel has no outcome labels".into()))?;
        if let Some((bad, _)) = groups.iter().find(|(l, _)| *l != GROUND && *l != EXCITED) {
            return Err(Error::InvalidParameter(format!("outcome label {bad} is not ±1")));
        }
        Ok(Self { target, pre, device, post, groups })
    }

    /// Rotations from [`projection_procedure`] around a labelled device
    /// channel that measures |0⟩.
    pub fn with_device(v: &[C64], device: KrausChannel) -> Result<Self> {
        let target = BinaryObservable::new(v)?;
        let p = projection_procedure(target.ray())?;
        Self::new(target, p.pre, device, p.post)
    }

    /// The degenerate projective measurement `{|v⟩⟨v|, I − |v⟩⟨v|}`.
    pub fn ideal_binary(v: &[C64]) -> Result<Self> {
        Self::with_device(v, ideal_binary_channel())
    }

    /// `A_v` realized by a full three-outcome projective readout whose
    /// outcomes 1 and 2 are both reported as −1.
    pub fn ternary(v: &[C64]) -> Result<Self> {
        Self::with_device(v, ideal_ternary_channel())
    }

    pub fn target(&self) -> &BinaryObservable {
        &self.target
    }

    pub fn pre(&self) -> &UnitaryMatrix {
        &self.pre
    }

    pub fn post(&self) -> &UnitaryMatrix {
        &self.post
    }

    pub fn device(&self) -> &KrausChannel {
        &self.device
    }

    pub fn dim(&self) -> usize {
        self.device.dim()
    }

    /// Unnormalized post-measurement operator for each outcome label.
    pub fn branches(&self, rho: &ComplexMatrix) -> Vec<(f64, ComplexMatrix)> {
        let rotated = self.pre.matrix().sandwich(rho);
        self.groups
            .iter()
            .map(|(label, idx)| (*label, self.post.matrix().sandwich(&self.device.branch(&rotated, idx))))
            .collect()
    }

    /// Outcome-averaged channel.
    pub fn channel(&self) -> Result<KrausChannel> {
        self.device.conjugated(&self.pre, &self.post)
    }

    /// Heisenberg-picture observable of the recorded label, `Σ_a a E_a†(I)`.
    pub fn recorded_observable(&self) -> ComplexMatrix {
        let d = self.dim();
        let ch = self.channel().expect("dimensions checked at construction");
        let mut out = ComplexMatrix::zeros(d, d);
        for (label, idx) in &self.groups {
            for &k in idx {
                let op = &ch.ops()[k];
                out += &(&op.adjoint() * op).scale_real(*label);
            }
        }
        out.hermitian_part()
    }
}
