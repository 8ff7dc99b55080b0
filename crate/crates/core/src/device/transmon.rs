//! Transmon level structure from the charge-basis Hamiltonian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bisect_count, brent};

const MAX_DOUBLINGS: usize = 5;
/// Doubling the charge cutoff must move ω_2 by less than this (MHz).
const CUTOFF_TOLERANCE: f64 = 1e-3;

/// Cooper-pair box / transmon parameters. Energies in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonSpec {
    pub e_j: f64,
    pub e_c: f64,
    #[serde(default)]
    pub n_g: f64,
    #[serde(default = "default_cutoff")]
    pub charge_cutoff: usize,
}

fn default_cutoff() -> usize {
    20
}

impl TransmonSpec {
    pub fn new(e_j: f64, e_c: f64) -> Result<Self> {
        let spec = Self { e_j, e_c, n_g: 0.0, charge_cutoff: default_cutoff() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_j >= 0.0 && self.e_c > 0.0) || !self.n_g.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "transmon needs E_J ≥ 0 and E_C > 0, got E_J = {}, E_C = {}",
                self.e_j, self.e_c
            )));
        }
        if self.charge_cutoff < 10 {
            return Err(Error::InvalidParameter(format!(
                "charge cutoff must be at least 10, got {}",
                self.charge_cutoff
            )));
        }
        Ok(())
    }
}

/// Level frequencies of a multilevel system (MHz), with ω_0 = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QutritLevels {
    pub omega: Vec<f64>,
}

impl QutritLevels {
    /// Levels from an explicit list; shifted so that ω_0 = 0.
    pub fn from_frequencies(omega: &[f64]) -> Result<Self> {
        if omega.len() < 2 || omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidParameter("need at least two finite level frequencies".into()));
        }
        let w0 = omega[0];
        Ok(Self { omega: omega.iter().map(|w| w - w0).collect() })
    }

    /// Weakly anharmonic (Duffing) ladder ω_i = i·f01 + i(i−1)/2·α, for
    /// which α is the same between every neighbouring pair.
    pub fn duffing(f01: f64, alpha: f64, n_levels: usize) -> Self {
        let omega = (0..n_levels)
            .map(|i| {
                let i = i as f64;
                i * f01 + 0.5 * i * (i - 1.0) * alpha
            })
            .collect();
        Self { omega }
    }

    pub fn n_levels(&self) -> usize {
        self.omega.len()
    }

    pub fn f01(&self) -> f64 {
        self.omega[1] - self.omega[0]
    }

    /// (ω_2 − ω_1) − (ω_1 − ω_0); NaN with fewer than three levels.
    pub fn alpha(&self) -> f64 {
        if self.omega.len() < 3 {
            return f64::NAN;
        }
        (self.omega[2] - self.omega[1]) - (self.omega[1] - self.omega[0])
    }

    /// Moves the ladder so that f01 changes by `shift`: ω_i → ω_i + i·shift.
    /// This is how a flux-tuned transition is swept at fixed anharmonicity.
    pub fn shifted(&self, shift: f64) -> Self {
        Self { omega: self.omega.iter().enumerate().map(|(i, w)| w + i as f64 * shift).collect() }
    }
}

/// Sturm count: number of eigenvalues of the charge Hamiltonian below `x`.
fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let off2 = off * off;
    let mut count = 0;
    let mut q = 1.0;
    for (k, &d) in diag.iter().enumerate() {
        q = if k == 0 { d - x } else { d - x - off2 / q };
        if q == 0.0 {
            q = f64::EPSILON * (d.abs() + off.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn charge_diagonal(spec: &TransmonSpec, cutoff: usize) -> Vec<f64> {
    let n = cutoff as i64;
    (-n..=n)
        .map(|q| {
            let x = q as f64 - spec.n_g;
            4.0 * spec.e_c * x * x
        })
        .collect()
}

/// Lowest `n_levels` eigenvalues of the tridiagonal charge Hamiltonian with
/// cutoff `cutoff`, unshifted.
pub fn charge_eigenvalues(spec: &TransmonSpec, cutoff: usize, n_levels: usize) -> Vec<f64> {
    let diag = charge_diagonal(spec, cutoff);
    let off = -0.5 * spec.e_j;
    let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * off.abs() - 1.0;
    let hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * off.abs() + 1.0;
    (0..n_levels.min(diag.len())).map(|k| bisect_count(|x| sturm_count(&diag, off, x), k, lo, hi, 1e-15)).collect()
}

/// Transmon levels (MHz, ω_0 = 0). The charge cutoff is doubled from the
/// spec's value until ω_2 moves by less than 1 kHz.
pub fn transmon_levels(spec: &TransmonSpec, n_levels: usize) -> Result<QutritLevels> {
    spec.validate()?;
    if n_levels < 2 {
        return Err(Error::InvalidParameter("need at least two transmon levels".into()));
    }
    let probe = n_levels.max(3);
    let mut cutoff = spec.charge_cutoff;
    let mut current = charge_eigenvalues(spec, cutoff, probe);
    for _ in 0..MAX_DOUBLINGS {
        let refined = charge_eigenvalues(spec, 2 * cutoff, probe);
        let moved = ((refined[2] - refined[0]) - (current[2] - current[0])).abs();
        current = refined;
        cutoff *= 2;
        if moved < CUTOFF_TOLERANCE {
            current.truncate(n_levels);
            return QutritLevels::from_frequencies(&current);
        }
    }
    Err(Error::NoConvergence(format!("transmon levels not converged at charge cutoff {cutoff}")))
}

/// (f01, α) per unit E_C at ratio E_J/E_C = `ratio`.
fn unit_transitions(ratio: f64) -> Result<(f64, f64)> {
    let levels = transmon_levels(&TransmonSpec::new(ratio, 1.0)?, 3)?;
    Ok((levels.f01(), levels.alpha()))
}

/// Finds (E_J, E_C) reproducing a measured f01 and anharmonicity α (MHz).
///
/// The levels scale linearly in E_C at fixed E_J/E_C, so α/f01 depends on
/// the ratio alone. The ratio is found by a 1-D root search and E_C then
/// follows from f01.
pub fn fit_transmon(f01: f64, alpha: f64) -> Result<TransmonSpec> {
    if !(alpha < 0.0) || !(f01 > 0.0) || alpha.abs() >= f01 {
        return Err(Error::InvalidParameter(format!(
            "transmon fit needs α < 0 and |α| < f01, got f01 = {f01}, α = {alpha}"
        )));
    }
    let target = alpha / f01;
    let log_ratio = brent(
        "alpha/f01 versus log(E_J/E_C)",
        |lr| {
            let (f, a) = unit_transitions(lr.exp())?;
            Ok(a / f - target)
        },
        (5.0f64).ln(),
        (1e5f64).ln(),
        1e-13,
    )?;
    let ratio = log_ratio.exp();
    let (f_unit, _) = unit_transitions(ratio)?;
    let e_c = f01 / f_unit;
    TransmonSpec::new(ratio * e_c, e_c)
}
