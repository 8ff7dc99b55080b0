//! Coherent pointer states of the driven cavity and the coherence factors
//! they imprint on the qutrit.
//!
//! With the qutrit in |i⟩ the cavity amplitude obeys
//! dα_i/dt = −(i·2πΔ_i + πκ)·α_i + ε, Δ_i = f_r + χ_i − ν_d, with the drive
//! on for `duration` and off afterwards. Writing the joint state as
//! Σ c_ij |i⟩⟨j| ⊗ |α_i⟩⟨α_j|, the weights obey
//! dc_ij/dt = c_ij·[−i·Im(ε α_i) + i·Im(ε α_j) + 2πκ(α_i α_j* − |α_i|²/2 − |α_j|²/2)]
//! and the reduced qutrit coherence is c_ij·⟨α_j|α_i⟩. All integrals are in
//! closed form.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::ComplexMatrix;

/// Number of qutrit levels that carry a pointer state.
pub const LEVELS: usize = 3;

/// Dispersive readout drive and cavity. Frequencies in MHz, times in µs,
/// ε in µs⁻¹ (so |α|² is a photon number).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutConfig {
    /// Bare cavity frequency.
    pub f_r: f64,
    /// Cavity pulls: with the qutrit in |i⟩ the cavity sits at f_r + pulls[i].
    pub pulls: [f64; LEVELS],
    pub kappa: f64,
    /// Drive frequency ν_d.
    pub drive_frequency: f64,
    /// Drive amplitude ε.
    pub amplitude: f64,
    /// Length of the square drive pulse.
    pub duration: f64,
    /// Length of the signal integration window, measured from the pulse start.
    #[serde(default = "default_window")]
    pub integration_window: f64,
    /// Gaussian noise on the integrated signal (photon-amplitude units).
    #[serde(default = "default_sigma")]
    pub signal_noise: f64,
    /// Pointer separation, in units of `signal_noise`, above which the
    /// readout projects.
    #[serde(default = "default_threshold")]
    pub snr_threshold: f64,
}

fn default_window() -> f64 {
    1.2
}

fn default_sigma() -> f64 {
    0.1
}

fn default_threshold() -> f64 {
    5.0
}

impl ReadoutConfig {
    /// Drive midway between the |0⟩ and |1⟩ cavity lines.
    pub fn new(f_r: f64, pulls: [f64; LEVELS], kappa: f64, amplitude: f64, duration: f64) -> Self {
        Self {
            f_r,
            pulls,
            kappa,
            drive_frequency: f_r + 0.5 * (pulls[0] + pulls[1]),
            amplitude,
            duration,
            integration_window: default_window(),
            signal_noise: default_sigma(),
            snr_threshold: default_threshold(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0) {
            return Err(Error::InvalidParameter(format!("cavity linewidth must be positive, got {}", self.kappa)));
        }
        if !(self.duration >= 0.0) || !(self.integration_window > 0.0) {
            return Err(Error::InvalidParameter("readout duration must be ≥ 0 and window > 0".into()));
        }
        if !(self.amplitude >= 0.0) || !(self.signal_noise > 0.0) || !(self.snr_threshold >= 0.0) {
            return Err(Error::InvalidParameter("drive amplitude ≥ 0, noise > 0 and threshold ≥ 0 required".into()));
        }
        let finite = [self.f_r, self.drive_frequency].iter().chain(&self.pulls).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("readout frequencies must be finite".into()));
        }
        Ok(())
    }

    pub fn with_duration(&self, duration: f64) -> Self {
        Self { duration, ..self.clone() }
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self { amplitude, ..self.clone() }
    }

    /// Cavity-minus-drive detuning for level `i` (MHz).
    pub fn detuning(&self, i: usize) -> f64 {
        self.f_r + self.pulls[i] - self.drive_frequency
    }

    /// Complex decay rate λ_i = i·2πΔ_i + πκ (µs⁻¹).
    pub fn lambda(&self, i: usize) -> C64 {
        C64::new(PI * self.kappa, 2.0 * PI * self.detuning(i))
    }

    /// Driven steady state ε/λ_i.
    pub fn steady_amplitude(&self, i: usize) -> C64 {
        C64::new(self.amplitude, 0.0) / self.lambda(i)
    }

    /// α_i(t), with the drive on during [0, duration].
    pub fn amplitude_at(&self, i: usize, t: f64) -> C64 {
        if t <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let lam = self.lambda(i);
        let on = t.min(self.duration);
        let at_end = self.steady_amplitude(i) * (C64::new(1.0, 0.0) - (-lam * on).exp());
        if t <= self.duration {
            at_end
        } else {
            at_end * (-lam * (t - self.duration)).exp()
        }
    }
}

/// Sampled pointer amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerTrajectory {
    pub times: Vec<f64>,
    /// `alpha[i][k]` = α_i(times[k]).
    pub alpha: Vec<Vec<C64>>,
}

pub fn pointer_trajectories(cfg: &ReadoutConfig, times: &[f64]) -> Result<PointerTrajectory> {
    cfg.validate()?;
    let alpha = (0..LEVELS).map(|i| times.iter().map(|&t| cfg.amplitude_at(i, t)).collect()).collect();
    Ok(PointerTrajectory { times: times.to_vec(), alpha })
}

/// (1 − e^{−μt})/μ
fn e_int(mu: C64, t: f64) -> C64 {
    if mu.norm() * t < 1e-8 {
        return C64::new(t, 0.0) * (C64::new(1.0, 0.0) - mu * (0.5 * t));
    }
    (C64::new(1.0, 0.0) - (-mu * t).exp()) / mu
}

/// ln c_ij(t): the integral of the weight equation from 0 to `t`.
fn log_weight(cfg: &ReadoutConfig, i: usize, j: usize, t: f64) -> C64 {
    let zero = C64::new(0.0, 0.0);
    if i == j || t <= 0.0 {
        return zero;
    }
    let two_pi_kappa = 2.0 * PI * cfg.kappa;
    let eps = cfg.amplitude;
    let (li, lj) = (cfg.lambda(i), cfg.lambda(j));
    let (ai, aj) = (cfg.steady_amplitude(i), cfg.steady_amplitude(j));
    let on = t.min(cfg.duration);

    // ∫ α dt and ∫ α_a α_b* dt over the driven segment.
    let int_alpha = |a: C64, l: C64| a * (on - e_int(l, on));
    let int_prod = |a: C64, la: C64, b: C64, lb: C64| {
        a * b.conj() * (C64::new(on, 0.0) - e_int(la, on) - e_int(lb.conj(), on) + e_int(la + lb.conj(), on))
    };
    let stark = C64::new(0.0, -eps * int_alpha(ai, li).im + eps * int_alpha(aj, lj).im);
    let overlap = int_prod(ai, li, aj, lj) - 0.5 * int_prod(ai, li, ai, li) - 0.5 * int_prod(aj, lj, aj, lj);
    let mut total = stark + overlap * two_pi_kappa;

    if t > cfg.duration {
        let off = t - cfg.duration;
        let (bi, bj) = (cfg.amplitude_at(i, cfg.duration), cfg.amplitude_at(j, cfg.duration));
        let cross = bi * bj.conj() * e_int(li + lj.conj(), off);
        let own = e_int(C64::new(two_pi_kappa, 0.0), off) * (0.5 * (bi.norm_sqr() + bj.norm_sqr()));
        total += (cross - own) * two_pi_kappa;
    }
    total
}

/// ⟨β|α⟩ for coherent states.
pub fn coherent_overlap(beta: C64, alpha: C64) -> C64 {
    (beta.conj() * alpha - 0.5 * (alpha.norm_sqr() + beta.norm_sqr())).exp()
}

/// Multiplier acting on the qutrit coherences at time `t` after the pulse
/// starts: ρ_ij(t) = M_ij(t)·ρ_ij(0).
pub fn coherence_matrix_at(cfg: &ReadoutConfig, t: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(LEVELS, LEVELS, |i, j| {
        if i == j {
            return C64::new(1.0, 0.0);
        }
        let overlap = coherent_overlap(cfg.amplitude_at(j, t), cfg.amplitude_at(i, t));
        log_weight(cfg, i, j, t).exp() * overlap
    })
}

/// Multiplier once the cavity has fully rung down.
pub fn coherence_matrix(cfg: &ReadoutConfig) -> ComplexMatrix {
    ComplexMatrix::from_fn(LEVELS, LEVELS, |i, j| {
        if i == j {
            return C64::new(1.0, 0.0);
        }
        let mut log = log_weight(cfg, i, j, cfg.duration);
        let (bi, bj) = (cfg.amplitude_at(i, cfg.duration), cfg.amplitude_at(j, cfg.duration));
        let two_pi_kappa = 2.0 * PI * cfg.kappa;
        let (li, lj) = (cfg.lambda(i), cfg.lambda(j));
        log +=
            (bi * bj.conj() / (li + lj.conj()) - 0.5 * (bi.norm_sqr() + bj.norm_sqr()) / two_pi_kappa) * two_pi_kappa;
        log.exp()
    })
}

/// Dephasing factor D_ij and phase φ_ij of the fully rung-down readout.
pub fn dephasing_and_phase(cfg: &ReadoutConfig, i: usize, j: usize) -> (f64, f64) {
    let m = coherence_matrix(cfg);
    (m[(i, j)].norm(), m[(i, j)].arg())
}

/// Mean pointer amplitude of level `i` over the integration window.
pub fn mean_amplitude(cfg: &ReadoutConfig, i: usize) -> C64 {
    let w = cfg.integration_window;
    let lam = cfg.lambda(i);
    let on = w.min(cfg.duration);
    let a = cfg.steady_amplitude(i);
    let mut total = a * (on - e_int(lam, on));
    if w > cfg.duration {
        total += cfg.amplitude_at(i, cfg.duration) * e_int(lam, w - cfg.duration);
    }
    total / w
}

/// Separation of the |0⟩ pointer from the closest excited-state pointer,
/// in units of the signal noise.
pub fn pointer_snr(cfg: &ReadoutConfig) -> f64 {
    let a0 = mean_amplitude(cfg, 0);
    (1..LEVELS).map(|r| (a0 - mean_amplitude(cfg, r)).norm()).fold(f64::INFINITY, f64::min) / cfg.signal_noise
}
