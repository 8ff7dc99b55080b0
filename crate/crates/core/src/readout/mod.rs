//! Dispersive measurement: pointer dynamics, the measurement channel,
//! outcome sampling and cavity transmission spectra.

pub mod pointer;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{free_evolution_superop, EvolutionSpec, NoiseParams};
use crate::numerics::brent;
use crate::qcore::channel::{apply_superoperator, schur_channel};
use crate::qcore::{ComplexMatrix, DensityMatrix, KrausChannel};

pub use pointer::{
    coherence_matrix, coherence_matrix_at, coherent_overlap, dephasing_and_phase, mean_amplitude, pointer_snr,
    pointer_trajectories, PointerTrajectory, ReadoutConfig,
};

/// Outcome label of the ground-state projector.
pub const GROUND: f64 = 1.0;
/// Outcome label of the excited subspace.
pub const EXCITED: f64 = -1.0;
/// Label carried by a readout too weak to resolve anything.
pub const INCONCLUSIVE: f64 = 0.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementMode {
    /// Pointer-state dephasing, projecting when the pointers are resolved.
    General,
    /// {|0⟩⟨0|, I − |0⟩⟨0|}.
    IdealBinary,
    /// {|0⟩⟨0|, |1⟩⟨1|, |2⟩⟨2|} with A_0 values (+1, −1, −1).
    IdealTernary,
}

pub fn ground_projector() -> ComplexMatrix {
    ComplexMatrix::basis_projector(3, 0)
}

pub fn excited_projector() -> ComplexMatrix {
    ComplexMatrix::real_diag(&[0.0, 1.0, 1.0])
}

pub fn ideal_binary_channel() -> KrausChannel {
    KrausChannel::new(vec![ground_projector(), excited_projector()], Some(vec![GROUND, EXCITED]))
        .expect("projectors resolve the identity")
}

pub fn ideal_ternary_channel() -> KrausChannel {
    KrausChannel::full_dephasing(3).with_labels(vec![GROUND, EXCITED, EXCITED]).expect("one label per projector")
}

/// The readout as a channel. In general mode the coherences are multiplied
/// by the rung-down pointer factors; when the |0⟩ pointer is resolved from
/// the others (SNR above threshold) the result is also split into the
/// outcome branches {|0⟩} and {|1⟩, |2⟩}.
pub fn measurement_channel(cfg: &ReadoutConfig, mode: MeasurementMode) -> Result<KrausChannel> {
    match mode {
        MeasurementMode::IdealBinary => Ok(ideal_binary_channel()),
        MeasurementMode::IdealTernary => Ok(ideal_ternary_channel()),
        MeasurementMode::General => {
            cfg.validate()?;
            let dephasing = schur_channel(&coherence_matrix(cfg))?;
            if pointer_snr(cfg) >= cfg.snr_threshold {
                let mut ops = Vec::new();
                let mut labels = Vec::new();
                for (proj, label) in [(ground_projector(), GROUND), (excited_projector(), EXCITED)] {
                    for k in dephasing.ops() {
                        ops.push(&proj * k);
                        labels.push(label);
                    }
                }
                KrausChannel::new(ops, Some(labels))
            } else {
                let n = dephasing.ops().len();
                dephasing.with_labels(vec![INCONCLUSIVE; n])
            }
        }
    }
}

/// Readout of `duration` with intrinsic noise acting over the same interval.
/// Both maps leave populations alone apart from relaxation and scale each
/// coherence independently, so they commute.
pub fn noisy_measurement_superop(
    cfg: &ReadoutConfig,
    mode: MeasurementMode,
    noise: &NoiseParams,
) -> Result<ComplexMatrix> {
    let free = free_evolution_superop(noise, &EvolutionSpec::idle(cfg.duration))?;
    Ok(&measurement_channel(cfg, mode)?.superoperator() * &free)
}

/// One recorded shot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub outcome: f64,
    /// Integrated signal: |mean pointer amplitude| of the branch plus noise.
    pub signal: f64,
    pub shot: u64,
}

/// Born-rule probabilities of each outcome group of `channel`.
pub fn outcome_probabilities(channel: &KrausChannel, rho: &DensityMatrix) -> Result<Vec<(f64, f64)>> {
    let groups =
        channel.outcome_groups().ok_or_else(|| Error::InvalidParameter("channel carries no outcome labels".into()))?;
    Ok(groups.iter().map(|(label, idx)| (*label, channel.branch(rho.matrix(), idx).trace().re.max(0.0))).collect())
}

/// Draws one outcome and returns the record with the normalized post-state.
pub fn sample_outcome<R: Rng + ?Sized>(
    cfg: &ReadoutConfig,
    channel: &KrausChannel,
    rho: &DensityMatrix,
    shot: u64,
    rng: &mut R,
) -> Result<(MeasurementRecord, DensityMatrix)> {
    let groups =
        channel.outcome_groups().ok_or_else(|| Error::InvalidParameter("channel carries no outcome labels".into()))?;
    let branches: Vec<ComplexMatrix> = groups.iter().map(|(_, idx)| channel.branch(rho.matrix(), idx)).collect();
    let probs: Vec<f64> = branches.iter().map(|b| b.trace().re.max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut pick = probs.len() - 1;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            pick = k;
            break;
        }
    }
    post_measurement(cfg, &groups[pick].0, &branches[pick], probs[pick], shot, rng)
}

/// Conditions on a specific outcome label.
pub fn condition_on<R: Rng + ?Sized>(
    cfg: &ReadoutConfig,
    channel: &KrausChannel,
    rho: &DensityMatrix,
    label: f64,
    rng: &mut R,
) -> Result<(MeasurementRecord, DensityMatrix)> {
    let groups =
        channel.outcome_groups().ok_or_else(|| Error::InvalidParameter("channel carries no outcome labels".into()))?;
    let (_, idx) = groups
        .iter()
        .find(|(l, _)| *l == label)
        .ok_or_else(|| Error::InvalidParameter(format!("outcome {label} is not produced by this channel")))?;
    let branch = channel.branch(rho.matrix(), idx);
    let p = branch.trace().re;
    post_measurement(cfg, &label, &branch, p, 0, rng)
}

fn post_measurement<R: Rng + ?Sized>(
    cfg: &ReadoutConfig,
    label: &f64,
    branch: &ComplexMatrix,
    p: f64,
    shot: u64,
    rng: &mut R,
) -> Result<(MeasurementRecord, DensityMatrix)> {
    if !(p > 1e-14) {
        return Err(Error::ZeroProbability(format!("outcome {label} has probability {p:.3e}")));
    }
    let post = DensityMatrix::new(branch.scale_real(1.0 / p).hermitian_part())?;
    let pops = post.populations();
    let level = (0..3).max_by(|&a, &b| pops[a].total_cmp(&pops[b])).unwrap_or(0);
    let noise = Normal::new(0.0, cfg.signal_noise).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let signal = mean_amplitude(cfg, level).norm() + noise.sample(rng);
    Ok((MeasurementRecord { outcome: *label, signal, shot }, post))
}

/// Drive amplitude at which the rung-down 0↔1 coherence factor equals
/// `target` for a pulse of `duration`.
pub fn calibrate_amplitude(cfg: &ReadoutConfig, duration: f64, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!("erasure target {target} outside (0, 1)")));
    }
    let base = cfg.with_duration(duration);
    // ln D01 scales with ε², so search in ε on a bracket that grows until it
    // straddles the target.
    let f = |eps: f64| -> Result<f64> {
        let (d, _) = dephasing_and_phase(&base.with_amplitude(eps), 0, 1);
        Ok(d.max(1e-300).ln() - target.ln())
    };
    let mut hi = 1.0;
    while f(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::NoConvergence("readout cannot erase the 0↔1 coherence".into()));
        }
    }
    brent("readout erasure", f, 0.0, hi, 1e-10)
}

/// Which prepared level a spectrum is taken for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub frequency: f64,
    pub amplitude: f64,
}

/// Transmitted amplitude versus drive frequency for a qutrit prepared in
/// `level`. Without relaxation each line is the Lorentzian |ε/λ_i|, peaked
/// at f_r + pulls[i]. With relaxation the complex steady amplitudes are
/// averaged with the level populations over the integration window, which
/// produces side peaks at the lines of the lower levels.
pub fn transmission_spectrum(
    cfg: &ReadoutConfig,
    level: usize,
    relaxation: Option<&NoiseParams>,
    frequencies: &[f64],
) -> Result<Vec<SpectrumPoint>> {
    cfg.validate()?;
    if level >= 3 {
        return Err(Error::InvalidParameter(format!("level {level} outside the qutrit")));
    }
    let weights = match relaxation {
        None => {
            let mut w = [0.0; 3];
            w[level] = 1.0;
            w
        }
        Some(noise) => window_populations(noise, level, cfg.integration_window)?,
    };
    Ok(frequencies
        .iter()
        .map(|&nu| {
            let c = ReadoutConfig { drive_frequency: nu, ..cfg.clone() };
            let field: num_complex::Complex64 = (0..3).map(|i| c.steady_amplitude(i) * weights[i]).sum();
            SpectrumPoint { frequency: nu, amplitude: field.norm() }
        })
        .collect())
}

/// Populations averaged over [0, window] starting from |level⟩ (Simpson).
fn window_populations(noise: &NoiseParams, level: usize, window: f64) -> Result<[f64; 3]> {
    let n = 200;
    let h = window / n as f64;
    let step = free_evolution_superop(noise, &EvolutionSpec::idle(h))?;
    let mut rho = ComplexMatrix::basis_projector(3, level);
    let mut acc = [0.0; 3];
    for k in 0..=n {
        let w = if k == 0 || k == n {
            1.0
        } else if k % 2 == 1 {
            4.0
        } else {
            2.0
        };
        for (i, a) in acc.iter_mut().enumerate() {
            *a += w * rho[(i, i)].re;
        }
        rho = apply_superoperator(&step, &rho);
    }
    Ok(acc.map(|a| a * h / (3.0 * window)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{apply_channel, C64};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sweet() -> ReadoutConfig {
        ReadoutConfig::new(7182.0, [1.3, -0.003, -0.003], 1.71, 20.0, 1.0)
    }

    fn psi0() -> DensityMatrix {
        DensityMatrix::pure(&[C64::new(1.0 / 3f64.sqrt(), 0.0); 3]).unwrap()
    }

    #[test]
    fn zero_drive_is_identity() {
        let ch = measurement_channel(&sweet().with_amplitude(0.0), MeasurementMode::General).unwrap();
        let rho = psi0();
        let out = apply_channel(&ch, &rho).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 1e-12));
    }

    #[test]
    fn strong_sweet_spot_readout_is_binary() {
        let cfg = sweet().with_duration(2.0);
        let ch = measurement_channel(&cfg, MeasurementMode::General).unwrap();
        let out = apply_channel(&ch, &psi0()).unwrap();
        let ideal = apply_channel(&ideal_binary_channel(), &psi0()).unwrap();
        assert!(out.matrix().approx_eq(ideal.matrix(), 1e-9));
        assert_eq!(dephasing_and_phase(&cfg, 1, 2), (1.0, 0.0));
    }

    #[test]
    fn dephasing_regime_keeps_populations() {
        let cfg = ReadoutConfig { signal_noise: 100.0, ..sweet().with_duration(0.05) };
        let ch = measurement_channel(&cfg, MeasurementMode::General).unwrap();
        assert_eq!(ch.labels().unwrap()[0], INCONCLUSIVE);
        let rho = psi0();
        let out = apply_channel(&ch, &rho).unwrap();
        for i in 0..3 {
            assert!((out.get(i, i) - rho.get(i, i)).norm() < 1e-12);
        }
    }

    #[test]
    fn born_probabilities_and_sampling() {
        let cfg = sweet();
        let ch = ideal_binary_channel();
        let probs = outcome_probabilities(&ch, &psi0()).unwrap();
        assert!((probs[0].1 - 1.0 / 3.0).abs() < 1e-12 || (probs[1].1 - 1.0 / 3.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shots = 100_000;
        let mut ground = 0;
        for s in 0..shots {
            let (rec, _) = sample_outcome(&cfg, &ch, &psi0(), s, &mut rng).unwrap();
            if rec.outcome == GROUND {
                ground += 1;
            }
        }
        let p = 1.0 / 3.0;
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        assert!((ground as f64 / shots as f64 - p).abs() < 3.0 * sigma);

        let (rec, post) = sample_outcome(&cfg, &ch, &DensityMatrix::basis(3, 0), 0, &mut rng).unwrap();
        assert_eq!(rec.outcome, GROUND);
        assert!((post.get(0, 0).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn impossible_outcome_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = condition_on(&sweet(), &ideal_binary_channel(), &DensityMatrix::basis(3, 0), EXCITED, &mut rng);
        assert!(matches!(e, Err(Error::ZeroProbability(_))));
    }

    #[test]
    fn calibration_hits_target() {
        let eps = calibrate_amplitude(&sweet(), 0.15, 0.005).unwrap();
        let (d, _) = dephasing_and_phase(&sweet().with_amplitude(eps).with_duration(0.15), 0, 1);
        assert!((d - 0.005).abs() < 1e-8);
    }

    #[test]
    fn spectrum_peaks_at_pulled_lines() {
        let cfg = ReadoutConfig::new(7182.0, [1.3, -0.4, 0.2], 1.71, 5.0, 1.0);
        let freqs: Vec<f64> = (0..4001).map(|k| 7178.0 + 0.002 * k as f64).collect();
        for level in 0..3 {
            let s = transmission_spectrum(&cfg, level, None, &freqs).unwrap();
            let peak = s.iter().max_by(|a, b| a.amplitude.total_cmp(&b.amplitude)).unwrap();
            assert!((peak.frequency - (7182.0 + cfg.pulls[level])).abs() < 0.0011);
        }
    }

    #[test]
    fn relaxation_adds_ground_side_peak() {
        let cfg = ReadoutConfig::new(7182.0, [4.0, -2.0, -2.0], 1.71, 5.0, 1.0);
        let noise = NoiseParams::new(1.0, 1.0, 0.5, 0.0).unwrap();
        let freqs: Vec<f64> = (0..2001).map(|k| 7176.0 + 0.006 * k as f64).collect();
        let local_max_near = |s: &[SpectrumPoint], nu: f64| {
            s.windows(3).any(|w| {
                w[1].amplitude > w[0].amplitude && w[1].amplitude > w[2].amplitude && (w[1].frequency - nu).abs() < 0.3
            })
        };
        let plain = transmission_spectrum(&cfg, 1, None, &freqs).unwrap();
        let relaxed = transmission_spectrum(&cfg, 1, Some(&noise), &freqs).unwrap();
        assert!(!local_max_near(&plain, 7186.0));
        assert!(local_max_near(&relaxed, 7186.0));
        assert!(local_max_near(&relaxed, 7180.0));
    }
}
