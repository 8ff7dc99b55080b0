//! Left-to-right composition of pulses, delays and channels.

use super::{free_evolution_superop, EvolutionSpec, NoiseParams};
use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, KrausChannel, UnitaryMatrix};

/// One operation in a timeline.
#[derive(Debug, Clone)]
pub enum Step {
    Unitary(UnitaryMatrix),
    Channel(KrausChannel),
    /// Column-stacked superoperator.
    Superoperator(ComplexMatrix),
    /// Free evolution under the given noise model; its duration is the
    /// evolution time.
    Free(NoiseParams, EvolutionSpec),
}

/// A step together with the wall-clock time it occupies (µs).
#[derive(Debug, Clone)]
pub struct TimelineItem {
    pub step: Step,
    pub duration: f64,
}

impl TimelineItem {
    /// Instantaneous pulse.
    pub fn pulse(u: UnitaryMatrix) -> Self {
        Self { step: Step::Unitary(u), duration: 0.0 }
    }

    pub fn channel(ch: KrausChannel, duration: f64) -> Self {
        Self { step: Step::Channel(ch), duration }
    }

    pub fn superoperator(s: ComplexMatrix, duration: f64) -> Self {
        Self { step: Step::Superoperator(s), duration }
    }

    pub fn free(noise: NoiseParams, spec: EvolutionSpec) -> Self {
        Self { duration: spec.duration, step: Step::Free(noise, spec) }
    }

    fn superop(&self, d: usize) -> Result<ComplexMatrix> {
        let s = match &self.step {
            Step::Unitary(u) => KrausChannel::unitary(u).superoperator(),
            Step::Channel(ch) => ch.superoperator(),
            Step::Superoperator(s) => s.clone(),
            Step::Free(noise, spec) => free_evolution_superop(noise, spec)?,
        };
        if s.rows() != d * d || s.cols() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "timeline step of size {}x{} in a dimension-{d} timeline",
                s.rows(),
                s.cols()
            )));
        }
        Ok(s)
    }
}

/// The channel realized by a whole timeline.
#[derive(Debug, Clone)]
pub struct Composite {
    pub superoperator: ComplexMatrix,
    pub total_duration: f64,
}

impl Composite {
    pub fn channel(&self) -> Result<KrausChannel> {
        KrausChannel::from_superoperator(&self.superoperator)
    }
}

/// Composes items left to right (the first item acts first) on a qutrit.
pub fn interleave(items: &[TimelineItem]) -> Result<Composite> {
    let d = 3;
    let mut total = ComplexMatrix::identity(d * d);
    let mut duration = 0.0;
    for item in items {
        if !(item.duration >= 0.0) {
            return Err(Error::InvalidParameter(format!("negative timeline duration {}", item.duration)));
        }
        total = &item.superop(d)? * &total;
        duration += item.duration;
    }
    Ok(Composite { superoperator: total, total_duration: duration })
}
