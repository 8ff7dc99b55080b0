//! Intrinsic decoherence of the qutrit and pulse–delay timelines.
//!
//! Free evolution is generated by a Lindblad equation with three jump
//! operators (|0⟩⟨1| and |1⟩⟨0| with thermal detailed balance on the 0↔1
//! pair, |1⟩⟨2| for decay of the second excited state) plus pure dephasing
//! that tops each coherence up to its T2. Rates are in µs⁻¹, detunings in
//! MHz.

pub mod timeline;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::channel::{choi_min_eigenvalue, CP_TOL};
use crate::qcore::{expm, ComplexMatrix, KrausChannel, C64};

pub use timeline::{interleave, Composite, Step, TimelineItem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    pub t1_01: f64,
    pub t2_01: f64,
    pub t2_12: f64,
    /// Thermal occupation of |1⟩.
    pub n_th: f64,
    /// Defaults to `t1_01 / 2`.
    #[serde(default)]
    pub t1_12: Option<f64>,
    /// Defaults to the clamped combination described on [`NoiseParams::t2_02`].
    #[serde(default)]
    pub t2_02: Option<f64>,
}

/// Decay and dephasing rates (µs⁻¹) of the Lindblad model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub down_10: f64,
    pub up_01: f64,
    pub down_21: f64,
    /// Extra pure-dephasing rates of ρ01, ρ12, ρ02.
    pub phi_01: f64,
    pub phi_12: f64,
    pub phi_02: f64,
}

impl NoiseParams {
    pub fn new(t1_01: f64, t2_01: f64, t2_12: f64, n_th: f64) -> Result<Self> {
        let p = Self { t1_01, t2_01, t2_12, n_th, t1_12: None, t2_02: None };
        p.rates()?;
        Ok(p)
    }

    /// Effectively noiseless: all times set to 10¹² µs.
    pub fn noiseless() -> Self {
        let t = 1e12;
        Self { t1_01: t, t2_01: t, t2_12: t, n_th: 0.0, t1_12: Some(t), t2_02: Some(t) }
    }

    pub fn t1_12(&self) -> f64 {
        self.t1_12.unwrap_or(0.5 * self.t1_01)
    }

    /// 1/T2_02 = 1/T2_01 + 1/T2_12 − 1/(2·T1_01), clamped so that ρ02 never
    /// decays slower than either neighbouring coherence. The resulting pure
    /// dephasing rate is then kept inside the band where the dephasing part of
    /// the generator stays completely positive, |√γ01 − √γ12| ≤ √γ02 ≤ √γ01 + √γ12.
    pub fn t2_02(&self) -> f64 {
        if let Some(t) = self.t2_02 {
            return t;
        }
        let raw = 1.0 / self.t2_01 + 1.0 / self.t2_12 - 0.5 / self.t1_01;
        let rate = raw.max(1.0 / self.t2_01).max(1.0 / self.t2_12);
        let (down_10, up_01, down_21) = self.relaxation_rates();
        let a = (1.0 / self.t2_01 - 0.5 * (down_10 + up_01)).max(0.0).sqrt();
        let b = (1.0 / self.t2_12 - 0.5 * (down_10 + down_21)).max(0.0).sqrt();
        let t1_part = 0.5 * (up_01 + down_21);
        let phi = (rate - t1_part).clamp((a - b).powi(2), (a + b).powi(2));
        1.0 / (phi + t1_part)
    }

    fn relaxation_rates(&self) -> (f64, f64, f64) {
        ((1.0 - self.n_th) / self.t1_01, self.n_th / self.t1_01, 1.0 / self.t1_12())
    }

    pub fn rates(&self) -> Result<Rates> {
        let times = [self.t1_01, self.t2_01, self.t2_12, self.t1_12(), self.t2_02()];
        if times.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidParameter(format!("coherence times must be positive and finite, got {times:?}")));
        }
        if !(0.0..0.5).contains(&self.n_th) {
            return Err(Error::InvalidParameter(format!("thermal occupation {} outside [0, 0.5)", self.n_th)));
        }
        let (down_10, up_01, down_21) = self.relaxation_rates();
        let phi = |t2: f64, t1_part: f64, name: &str| {
            let r = 1.0 / t2 - t1_part;
            if r < -1e-12 * (1.0 / t2) {
                Err(Error::InvalidParameter(format!(
                    "T2_{name} = {t2} µs is longer than its relaxation limit {} µs",
                    1.0 / t1_part
                )))
            } else {
                Ok(r.max(0.0))
            }
        };
        let phi_01 = phi(self.t2_01, 0.5 * (down_10 + up_01), "01")?;
        let phi_12 = phi(self.t2_12, 0.5 * (down_10 + down_21), "12")?;
        let phi_02 = phi(self.t2_02(), 0.5 * (up_01 + down_21), "02")?;
        let (a, b, c) = (phi_01.sqrt(), phi_12.sqrt(), phi_02.sqrt());
        let slack = 1e-9 * (a + b + c);
        if c > a + b + slack || a > b + c + slack || b > a + c + slack {
            return Err(Error::InvalidParameter(format!(
                "pure dephasing rates ({phi_01}, {phi_12}, {phi_02}) µs⁻¹ of ρ01, ρ12, ρ02 admit no completely positive generator"
            )));
        }
        Ok(Rates { down_10, up_01, down_21, phi_01, phi_12, phi_02 })
    }
}

/// Free-evolution segment: duration (µs) and rotating-frame detunings of the
/// 0↔1 and 1↔2 transitions (MHz).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvolutionSpec {
    pub duration: f64,
    #[serde(default)]
    pub detuning_01: f64,
    #[serde(default)]
    pub detuning_12: f64,
}

impl EvolutionSpec {
    pub fn idle(duration: f64) -> Self {
        Self { duration, detuning_01: 0.0, detuning_12: 0.0 }
    }
}

fn dissipator(l: &ComplexMatrix, rate: f64) -> ComplexMatrix {
    let d = l.rows();
    let id = ComplexMatrix::identity(d);
    let ldl = &l.adjoint() * l;
    let jump = l.conj().kron(l);
    let anti = &id.kron(&ldl) + &ldl.transpose().kron(&id);
    (&jump - &anti.scale_real(0.5)).scale_real(rate)
}

/// 9×9 column-stacked Lindblad generator (µs⁻¹).
pub fn lindblad_generator(p: &NoiseParams, detuning_01: f64, detuning_12: f64) -> Result<ComplexMatrix> {
    let r = p.rates()?;
    let d = 3;
    let id = ComplexMatrix::identity(d);
    let energies = [0.0, detuning_01, detuning_01 + detuning_12];
    let h = ComplexMatrix::real_diag(&energies.map(|e| 2.0 * PI * e));
    let mut gen = (&id.kron(&h) - &h.transpose().kron(&id)).scale(C64::new(0.0, -1.0));
    gen += &dissipator(&ComplexMatrix::unit(d, 0, 1), r.down_10);
    gen += &dissipator(&ComplexMatrix::unit(d, 1, 0), r.up_01);
    gen += &dissipator(&ComplexMatrix::unit(d, 1, 2), r.down_21);
    // Pure dephasing acts entrywise on coherences: ρ_ij → −γ_ij ρ_ij.
    let gamma = [[0.0, r.phi_01, r.phi_02], [r.phi_01, 0.0, r.phi_12], [r.phi_02, r.phi_12, 0.0]];
    for i in 0..d {
        for j in 0..d {
            let k = j * d + i;
            gen[(k, k)] -= C64::new(gamma[i][j], 0.0);
        }
    }
    Ok(gen)
}

/// Superoperator of free evolution over `e.duration`.
pub fn free_evolution_superop(p: &NoiseParams, e: &EvolutionSpec) -> Result<ComplexMatrix> {
    if !(e.duration >= 0.0) {
        return Err(Error::InvalidParameter(format!("negative evolution time {}", e.duration)));
    }
    let gen = lindblad_generator(p, e.detuning_01, e.detuning_12)?;
    let s = expm(&gen.scale_real(e.duration));
    let min = choi_min_eigenvalue(&s)?;
    if min < -CP_TOL {
        return Err(Error::NotCompletelyPositive { eigenvalue: min });
    }
    Ok(s)
}

pub fn free_evolution_channel(p: &NoiseParams, e: &EvolutionSpec) -> Result<KrausChannel> {
    KrausChannel::from_superoperator(&free_evolution_superop(p, e)?)
}

/// Fixed point of the population dynamics: (1 − n_th, n_th, 0).
pub fn steady_state_populations(p: &NoiseParams) -> [f64; 3] {
    [1.0 - p.n_th, p.n_th, 0.0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::Rotation;
    use crate::qcore::channel::apply_superoperator;
    use crate::qcore::matrix::basis_ket;
    use crate::qcore::DensityMatrix;

    fn paper() -> NoiseParams {
        NoiseParams::new(15.0, 11.2, 5.78, 0.078).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let s = free_evolution_superop(&paper(), &EvolutionSpec::idle(0.0)).unwrap();
        assert!(s.approx_eq(&ComplexMatrix::identity(9), 1e-15));
    }

    #[test]
    fn coherences_decay_at_their_t2() {
        let p = paper();
        let t = 3.0;
        let s = free_evolution_superop(&p, &EvolutionSpec::idle(t)).unwrap();
        let psi = [C64::new(1.0 / 3f64.sqrt(), 0.0); 3];
        let rho = ComplexMatrix::outer(&psi, &psi);
        let out = apply_superoperator(&s, &rho);
        assert!((out[(0, 1)].re / rho[(0, 1)].re - (-t / 11.2).exp()).abs() < 1e-12);
        assert!((out[(1, 2)].re / rho[(1, 2)].re - (-t / 5.78).exp()).abs() < 1e-12);
        assert!((out[(0, 2)].re / rho[(0, 2)].re - (-t / p.t2_02()).exp()).abs() < 1e-12);
    }

    #[test]
    fn ramsey_01_signal_is_exact() {
        let p = paper();
        let half = Rotation::x01(PI / 2.0).compile();
        let start = DensityMatrix::basis(3, 0).evolve(&half).unwrap();
        for k in 0..=40 {
            let t = 0.5 * k as f64;
            let e = EvolutionSpec { duration: t, detuning_01: 1.0, detuning_12: 0.0 };
            let s = free_evolution_superop(&p, &e).unwrap();
            let mid = apply_superoperator(&s, start.matrix());
            let end = half.matrix().sandwich(&mid);
            let expected = 0.5 * ((-t / 11.2).exp() * (2.0 * PI * t).cos() + 1.0);
            assert!((end[(1, 1)].re - expected).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn long_times_reach_thermal_state() {
        let p = paper();
        let s = free_evolution_superop(&p, &EvolutionSpec::idle(400.0)).unwrap();
        let out = apply_superoperator(&s, &ComplexMatrix::basis_projector(3, 2));
        let expected = steady_state_populations(&p);
        for i in 0..3 {
            assert!((out[(i, i)].re - expected[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn cold_qutrit_relaxes_to_ground() {
        let p = NoiseParams::new(15.0, 11.2, 5.78, 0.0).unwrap();
        let s = free_evolution_superop(&p, &EvolutionSpec::idle(20.0 * 15.0)).unwrap();
        let ket = basis_ket(3, 2);
        let out = apply_superoperator(&s, &ComplexMatrix::outer(&ket, &ket));
        assert!(out[(0, 0)].re > 0.999);
    }

    #[test]
    fn over_long_t2_is_rejected() {
        assert!(NoiseParams::new(15.0, 31.0, 5.0, 0.0).is_err());
        assert!(NoiseParams::new(15.0, 11.0, 5.0, 0.6).is_err());
    }

    #[test]
    fn default_t2_02_respects_clamp() {
        let p = paper();
        assert!(p.t2_02() <= 5.78 + 1e-12);
    }

    #[test]
    fn default_t2_02_stays_completely_positive() {
        let p = NoiseParams::new(47.8, 12.55, 32.0, 0.016).unwrap();
        let s = free_evolution_superop(&p, &EvolutionSpec::idle(13.0)).unwrap();
        assert!(crate::qcore::channel::choi_min_eigenvalue(&s).unwrap() > -1e-12);
    }

    #[test]
    fn explicit_t2_02_outside_the_positive_band_is_rejected() {
        let mut p = NoiseParams::new(47.8, 12.55, 32.0, 0.016).unwrap();
        p.t2_02 = Some(1.0);
        assert!(p.rates().is_err());
    }
}
