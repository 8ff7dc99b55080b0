//! Second-order dispersive shifts of a multilevel system coupled to a cavity.
//!
//! With partial shifts χ_{i,i+1} = (i+1)g²/(δ + iα) the ac-Stark
//! coefficients are S_i = χ_{i−1,i} − χ_{i,i+1} (χ_{−1,0} = 0), and the
//! state-dependent cavity pulls are differences of neighbouring S_i.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Resonance denominators smaller than this (MHz) are treated as singular.
pub const MIN_DENOMINATOR: f64 = 1.0;

/// Beyond this |g/δ| the perturbative shifts are flagged as unreliable.
pub const DISPERSIVE_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersiveShifts {
    pub g: f64,
    pub delta: f64,
    pub alpha: f64,
    /// χ_{i,i+1} for i = 0, 1, 2.
    pub chi_partial: Vec<f64>,
    /// S_i for i = 0, 1, 2.
    pub stark: Vec<f64>,
    /// Half the cavity pull difference between |0⟩ and |1⟩.
    pub chi01: f64,
    /// Half the cavity pull difference between |1⟩ and |2⟩.
    pub chi12: f64,
}

impl DispersiveShifts {
    /// True when |g/δ| exceeds the dispersive limit.
    pub fn outside_dispersive_regime(&self) -> bool {
        (self.g / self.delta).abs() > DISPERSIVE_LIMIT
    }
}

/// Perturbative shifts for coupling `g`, detuning δ = f01 − f_r and
/// anharmonicity α (all MHz).
pub fn dispersive_shifts_2nd_order(g: f64, delta: f64, alpha: f64) -> Result<DispersiveShifts> {
    if ![g, delta, alpha].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter("dispersive shifts need finite g, δ, α".into()));
    }
    let chi_partial: Vec<f64> = (0..3)
        .map(|i| {
            let den = delta + i as f64 * alpha;
            if den.abs() < MIN_DENOMINATOR {
                Err(Error::Singular(format!("resonance δ + {i}α = {den:.3e} MHz between levels {i} and {}", i + 1)))
            } else {
                Ok((i + 1) as f64 * g * g / den)
            }
        })
        .collect::<Result<_>>()?;
    let stark: Vec<f64> = (0..3)
        .map(|i| {
            let below = if i == 0 { 0.0 } else { chi_partial[i - 1] };
            below - chi_partial[i]
        })
        .collect();
    Ok(DispersiveShifts {
        g,
        delta,
        alpha,
        chi01: 0.5 * (stark[1] - stark[0]),
        chi12: 0.5 * (stark[2] - stark[1]),
        chi_partial,
        stark,
    })
}

/// Factored closed form χ12 = −g²α(α−δ) / (δ(δ+α)(δ+2α)).
pub fn chi12_closed_form(g: f64, delta: f64, alpha: f64) -> f64 {
    -g * g * alpha * (alpha - delta) / (delta * (delta + alpha) * (delta + 2.0 * alpha))
}
