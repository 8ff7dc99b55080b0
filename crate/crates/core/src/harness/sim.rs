//! Building blocks shared by the experiment scripts: superoperators for the
//! timeline segments and the simulated detector.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::control::{table1_tomography_set, PulseSequence, Rotation};
use crate::error::{Error, Result};
use crate::noise::{free_evolution_superop, EvolutionSpec, NoiseParams};
use crate::qcore::channel::apply_superoperator;
use crate::qcore::{ComplexMatrix, DensityMatrix, KrausChannel};
use crate::readout::{measurement_channel, MeasurementMode, ReadoutConfig};
use crate::tomography::{build_design, mle_state, Measurement, Shots, TomographyDesign};

/// Free evolution over `duration` with the given rotating-frame detunings.
pub fn free(noise: &NoiseParams, duration: f64, detuning_01: f64, detuning_12: f64) -> Result<ComplexMatrix> {
    free_evolution_superop(noise, &EvolutionSpec { duration, detuning_01, detuning_12 })
}

/// Unconditional (outcome-averaged) readout channel.
pub fn readout_superop(cfg: &ReadoutConfig) -> Result<ComplexMatrix> {
    Ok(measurement_channel(cfg, MeasurementMode::General)?.superoperator())
}

pub fn unitary_superop(seq: &PulseSequence) -> ComplexMatrix {
    KrausChannel::unitary(&seq.compile()).superoperator()
}

/// Composes superoperators in time order (the first acts first).
pub fn chain(steps: &[&ComplexMatrix]) -> ComplexMatrix {
    let d2 = steps.first().map_or(9, |s| s.rows());
    steps.iter().fold(ComplexMatrix::identity(d2), |acc, s| *s * &acc)
}

pub fn evolve(s: &ComplexMatrix, rho: &ComplexMatrix) -> ComplexMatrix {
    apply_superoperator(s, rho).hermitian_part()
}

pub fn prepare(seq: &PulseSequence) -> Result<DensityMatrix> {
    DensityMatrix::pure(&seq.prepare())
}

/// Time-ordered sequence from written-order pulses.
pub fn written(pulses: Vec<Rotation>) -> PulseSequence {
    PulseSequence::from_written_order(pulses)
}

/// Per-point random stream derived from the run seed.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Detector returning exact expectations of the degenerate ground-state
/// readout, or averages of `shots` single-shot ±1 outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detector {
    pub shots: Option<u64>,
}

impl Detector {
    pub fn record(&self, design: &TomographyDesign, rho: &ComplexMatrix, rng: &mut ChaCha8Rng) -> Result<Shots> {
        let values = design.predict(rho);
        let Some(n) = self.shots else {
            return Ok(Shots::Exact { values });
        };
        let means = values
            .iter()
            .map(|&m| {
                let p = (0.5 * (1.0 + m)).clamp(0.0, 1.0);
                let bin = Binomial::new(n, p).map_err(|e| Error::InvalidParameter(e.to_string()))?;
                Ok(2.0 * bin.sample(rng) as f64 / n as f64 - 1.0)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Shots::Averaged { counts: vec![n; means.len()], means, single_shot_sigma: 1.0 })
    }

    /// Reconstructs the state from the full nine-setting degenerate design.
    pub fn reconstruct(
        &self,
        design: &TomographyDesign,
        rho: &ComplexMatrix,
        rng: &mut ChaCha8Rng,
    ) -> Result<DensityMatrix> {
        if self.shots.is_none() {
            return DensityMatrix::new(rho.clone());
        }
        mle_state(design, &self.record(design, rho, rng)?)
    }

    /// Level populations from the three settings {I, R01x(π), R12x(π)·R01x(π)}
    /// followed by the degenerate readout.
    pub fn populations(&self, rho: &ComplexMatrix, rng: &mut ChaCha8Rng) -> Result<[f64; 3]> {
        let design = population_design()?;
        let values = match self.record(&design, rho, rng)? {
            Shots::Exact { values } => values,
            Shots::Averaged { means, .. } => means,
            Shots::Counts { .. } => unreachable!("the detector records averages"),
        };
        Ok([0, 1, 2].map(|k| 0.5 * (1.0 + values[k])))
    }
}

pub fn state_design() -> Result<TomographyDesign> {
    build_design(&table1_tomography_set(), Measurement::degenerate_ground())
}

fn population_design() -> Result<TomographyDesign> {
    let set = [
        PulseSequence::identity(),
        written(vec![Rotation::x01(PI)]),
        written(vec![Rotation::x12(PI), Rotation::x01(PI)]),
    ];
    build_design(&set, Measurement::degenerate_ground())
}
