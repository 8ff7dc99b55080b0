//! State and process tomography of the readout.
//!
//! Timing: preparation, then `delay` of free evolution (optionally with a
//! readout pulse at its start, whose ring-down fills the rest of the delay),
//! then the tomography pulses and the degenerate ground-state readout.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::config::ResolvedConfig;
use super::output::OutputSink;
use super::sim::{chain, evolve, free, prepare, readout_superop, state_design, stream, written, Detector};
use crate::control::{table1_preparation_states, PulseSequence, Rotation};
use crate::error::Result;
use crate::qcore::{state_fidelity, ComplexMatrix, DensityMatrix, KrausChannel};
use crate::readout::ideal_binary_channel;
use crate::tomography::{
    ideal_process_matrix, mle_process, process_fidelity, OperatorBasis, ProcessData, ProcessMatrix, Shots,
};

/// Pulses preparing ψ0 = (|0⟩ + |1⟩ + |2⟩)/√3.
pub fn psi0_preparation() -> PulseSequence {
    let theta = 2.0 * (1.0 / 3f64.sqrt()).acos();
    written(vec![Rotation::x12(PI / 2.0), Rotation::x01(theta)])
}

/// The channel between preparation and tomography.
pub fn delay_superop(r: &ResolvedConfig, with_readout: bool) -> Result<ComplexMatrix> {
    let idle = free(&r.noise, r.tomography.delay, 0.0, 0.0)?;
    if !with_readout {
        return Ok(idle);
    }
    Ok(chain(&[&idle, &readout_superop(&r.readout)?]))
}

#[derive(Debug, Clone, Serialize)]
pub struct StateTomography {
    pub with_readout: bool,
    pub prepared: DensityMatrix,
    /// Model state entering the tomography pulses.
    pub actual: DensityMatrix,
    /// Ideal target: ψ0, or ψ0 after an ideal degenerate projection.
    pub target: DensityMatrix,
    pub reconstructed: DensityMatrix,
    pub fidelity_to_target: f64,
    pub fidelity_to_actual: f64,
}

pub fn state_tomography(r: &ResolvedConfig, with_readout: bool, seed: u64) -> Result<StateTomography> {
    let prepared = prepare(&psi0_preparation())?;
    let actual = DensityMatrix::new(evolve(&delay_superop(r, with_readout)?, prepared.matrix()))?;
    let target = if with_readout {
        DensityMatrix::new(ideal_binary_channel().apply_operator(prepared.matrix()))?
    } else {
        prepared.clone()
    };
    let design = state_design()?;
    let detector = Detector { shots: r.shots };
    let record = detector.record(&design, actual.matrix(), &mut stream(seed, u64::from(with_readout)))?;
    let reconstructed = crate::tomography::mle_state(&design, &record)?;
    Ok(StateTomography {
        with_readout,
        fidelity_to_target: state_fidelity(&reconstructed, &target)?,
        fidelity_to_actual: state_fidelity(&reconstructed, &actual)?,
        prepared,
        actual,
        target,
        reconstructed,
    })
}

pub fn compute_states(r: &ResolvedConfig, seed: u64) -> Result<[StateTomography; 2]> {
    Ok([state_tomography(r, false, seed)?, state_tomography(r, true, seed)?])
}

pub fn write_states(s: &[StateTomography; 2], sink: &mut OutputSink) -> Result<BTreeMap<String, f64>> {
    sink.json("state_tomography.json", s)?;
    let mut out = BTreeMap::new();
    for t in s {
        let key = if t.with_readout { "with_readout" } else { "without_readout" };
        out.insert(format!("{key}_fidelity_to_target"), t.fidelity_to_target);
        out.insert(format!("{key}_fidelity_to_actual"), t.fidelity_to_actual);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProcessTomography {
    pub basis: OperatorBasis,
    pub measured: ProcessMatrix,
    /// χ of the model channel itself, without tomography.
    pub model: ProcessMatrix,
    pub ideal: ProcessMatrix,
    pub fidelity_measured: f64,
    pub fidelity_model: f64,
    pub min_eigenvalue: f64,
    pub tp_deviation: f64,
}

pub fn process_tomography(r: &ResolvedConfig, seed: u64) -> Result<ProcessTomography> {
    let basis = OperatorBasis::gell_mann(3);
    let process = delay_superop(r, true)?;
    let preps = table1_preparation_states();
    let design = state_design()?;
    let detector = Detector { shots: r.shots };
    let shots = preps
        .iter()
        .enumerate()
        .map(|(k, rho)| detector.record(&design, &evolve(&process, rho.matrix()), &mut stream(seed, k as u64)))
        .collect::<Result<Vec<Shots>>>()?;
    let measured = mle_process(&preps, ProcessData::Raw { design: &design, shots: &shots }, &basis)?;
    let model = ideal_process_matrix(&KrausChannel::from_superoperator(&process)?, &basis)?;
    let ideal = ideal_process_matrix(&ideal_binary_channel(), &basis)?;
    Ok(ProcessTomography {
        fidelity_measured: process_fidelity(&ideal, &measured)?,
        fidelity_model: process_fidelity(&ideal, &model)?,
        min_eigenvalue: measured.min_eigenvalue()?,
        tp_deviation: measured.tp_deviation(),
        basis,
        measured,
        model,
        ideal,
    })
}

pub fn write_process(p: &ProcessTomography, sink: &mut OutputSink) -> Result<BTreeMap<String, f64>> {
    sink.json("process_tomography.json", p)?;
    Ok(BTreeMap::from([
        ("process_fidelity".into(), p.fidelity_measured),
        ("process_fidelity_model".into(), p.fidelity_model),
        ("chi_min_eigenvalue".into(), p.min_eigenvalue),
        ("chi_tp_deviation".into(), p.tp_deviation),
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;

    #[test]
    fn psi0_is_the_uniform_superposition() {
        let rho = prepare(&psi0_preparation()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((rho.get(i, j).re - 1.0 / 3.0).abs() < 1e-12 && rho.get(i, j).im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn noiseless_state_tomography_is_exact() {
        let r = ExperimentConfig::noiseless().resolve().unwrap();
        let [b, a] = compute_states(&r, 0).unwrap();
        assert!((b.fidelity_to_target - 1.0).abs() < 1e-6, "{}", b.fidelity_to_target);
        assert!((a.fidelity_to_actual - 1.0).abs() < 1e-6);
        assert!(a.fidelity_to_target > 0.999);
    }

    #[test]
    fn sampled_tomography_stays_close() {
        let cfg = ExperimentConfig { shots: Some(20_000), ..Default::default() };
        let r = cfg.resolve().unwrap();
        let t = state_tomography(&r, false, 3).unwrap();
        assert!(t.fidelity_to_actual > 0.99, "{}", t.fidelity_to_actual);
    }
}
