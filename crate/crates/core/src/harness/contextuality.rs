//! Compatibility of the degenerate |0⟩ and |ψ1⟩ measurements, for ideal
//! procedures and for the reconstructed readout process.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use super::config::ResolvedConfig;
use super::output::OutputSink;
use super::tomo::process_tomography;
use crate::contextuality::{
    default_state_set, epsilon_from_process, epsilon_uv, sequential_expectation, MeasurementProcedure, ProcessEpsilon,
    Record,
};
use crate::error::Result;
use crate::qcore::matrix::basis_ket;
use crate::qcore::{DensityMatrix, C64};

/// ψ1 = (|1⟩ + |2⟩)/√2.
pub fn psi1() -> Vec<C64> {
    vec![C64::new(0.0, 0.0), C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)]
}

#[derive(Debug, Clone, Serialize)]
pub struct ContextualityReport {
    /// ⟨A_ψ1|A_ψ1 A_0⟩ and ⟨A_ψ1|A_0 A_ψ1⟩ on |ψ1⟩ with ternary-based
    /// procedures.
    pub ternary_psi1_first: f64,
    pub ternary_zero_first: f64,
    pub epsilon_ternary: f64,
    pub epsilon_ideal_binary: f64,
    /// ε₀ψ₁ of the reconstructed readout process.
    pub measured: ProcessEpsilon,
    /// ε₀ψ₁ of the model readout process, without tomography.
    pub model: ProcessEpsilon,
    pub process_fidelity: f64,
    pub ensemble_size: usize,
}

pub fn compute(r: &ResolvedConfig, seed: u64) -> Result<ContextualityReport> {
    let zero = basis_ket(3, 0);
    let psi1 = psi1();
    let states = default_state_set(r.contextuality.haar_states, seed);
    let rho = DensityMatrix::pure(&psi1)?;

    let t0 = MeasurementProcedure::ternary(&zero)?;
    let t1 = MeasurementProcedure::ternary(&psi1)?;
    let ternary_psi1_first = sequential_expectation(&t1, &t0, &rho, Record::First)?;
    let ternary_zero_first = sequential_expectation(&t0, &t1, &rho, Record::Second)?;
    let epsilon_ternary = epsilon_uv(&t1, &t0, &states)?.epsilon;

    let b0 = MeasurementProcedure::ideal_binary(&zero)?;
    let b1 = MeasurementProcedure::ideal_binary(&psi1)?;
    let epsilon_ideal_binary = epsilon_uv(&b0, &b1, &states)?.epsilon;

    let tomo = process_tomography(r, seed)?;
    Ok(ContextualityReport {
        ternary_psi1_first,
        ternary_zero_first,
        epsilon_ternary,
        epsilon_ideal_binary,
        measured: epsilon_from_process(&tomo.measured, &zero, &psi1, &states)?,
        model: epsilon_from_process(&tomo.model, &zero, &psi1, &states)?,
        process_fidelity: tomo.fidelity_measured,
        ensemble_size: states.len(),
    })
}

pub fn write(c: &ContextualityReport, sink: &mut OutputSink) -> Result<BTreeMap<String, f64>> {
    sink.json("contextuality.json", c)?;
    Ok(BTreeMap::from([
        ("ternary_psi1_first".into(), c.ternary_psi1_first),
        ("ternary_zero_first".into(), c.ternary_zero_first),
        ("epsilon_ternary".into(), c.epsilon_ternary),
        ("epsilon_ideal_binary".into(), c.epsilon_ideal_binary),
        ("epsilon_measured".into(), c.measured.ensemble.epsilon),
        ("epsilon_measured_exact".into(), c.measured.exact),
        ("epsilon_model".into(), c.model.ensemble.epsilon),
        ("epsilon_model_exact".into(), c.model.exact),
        ("process_fidelity".into(), c.process_fidelity),
    ]))
}
