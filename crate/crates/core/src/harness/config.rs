//! Experiment configuration: JSON schema, presets and resolution into the
//! concrete parameters every experiment runs with.
//!
//! A config file is a JSON object; every key is optional and unknown keys are
//! rejected. Presets fill in the device and noise model and individual
//! numbers can be overridden on top of them:
//!
//! ```json
//! {
//!   "device": { "preset": "model_sweet_spot", "alpha": -310.0 },
//!   "noise": { "preset": "measured" },
//!   "readout": { "erasure_target": 0.005 },
//!   "shots": null,
//!   "ramsey": { "points": 201 }
//! }
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::device::{dressed_cavity_pull, find_sweet_spot, DeviceParams, SweetSpotMode, TransmonSpec};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::readout::{calibrate_amplitude, ReadoutConfig};

/// Bare cavity frequency of the reference device (MHz).
pub const CAVITY_FREQUENCY: f64 = 7182.0;
/// Qutrit-cavity coupling of the reference device (MHz).
pub const COUPLING: f64 = 20.0;
/// Output coupling quality factor; the preset linewidth is κ = f_r / Q.
pub const OUTPUT_Q: f64 = 4200.0;
/// Anharmonicity variants of the reference device (MHz).
pub const ANHARMONICITIES: [f64; 3] = [-300.0, -310.0, -314.0];

/// Energy-relaxation time of |1⟩ (µs).
pub const MEASURED_T1_01: f64 = 15.0;
/// Ramsey decay time of the 0↔1 coherence (µs).
pub const MEASURED_T2_01: f64 = 11.2;
/// Ramsey decay time of the 1↔2 coherence from the fringe fit (µs).
pub const MEASURED_T2_12: f64 = 5.78;
/// The same quantity as quoted in running text (µs).
pub const QUOTED_T2_12: f64 = 5.77;
/// Thermal occupation of |1⟩.
pub const MEASURED_N_TH: f64 = 0.078;

/// Named devices. All use a Duffing ladder coupled to the reference cavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DevicePreset {
    /// f01 at the exact χ12 root of the model for the chosen α.
    #[default]
    ModelSweetSpot,
    /// f01 = 6901 MHz, α = −314 MHz.
    Measured6901,
    /// f01 = 6906 MHz, α = −310 MHz.
    Measured6906,
    /// f01 = 6750 MHz, α = −310 MHz, far from the χ12 root.
    OffSweetSpot,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSection {
    #[serde(default)]
    pub preset: DevicePreset,
    pub f_r: Option<f64>,
    pub g: Option<f64>,
    pub alpha: Option<f64>,
    pub f01: Option<f64>,
    pub kappa: Option<f64>,
    /// Charge-basis transmon in place of the Duffing ladder.
    pub transmon: Option<TransmonSpec>,
    /// Fully explicit device; excludes every other key of this section.
    pub params: Option<DeviceParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePreset {
    /// T1 = 15.0, T2_01 = 11.2, T2_12 = 5.78 µs, n_th = 0.078.
    #[default]
    Measured,
    /// As `measured` with T2_12 = 5.77 µs.
    Quoted,
    /// No intrinsic decoherence.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default)]
    pub preset: NoisePreset,
    pub t1_01: Option<f64>,
    pub t2_01: Option<f64>,
    pub t2_12: Option<f64>,
    pub n_th: Option<f64>,
    pub t1_12: Option<f64>,
    pub t2_02: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReadoutSection {
    /// Drive amplitude ε (µs⁻¹); calibrated when absent.
    pub amplitude: Option<f64>,
    /// Pulse length used for experiments with a fixed readout (µs).
    pub duration: f64,
    /// Cavity ring-down wait after the pulse (µs).
    pub ring_down: f64,
    /// The calibrated drive leaves this 0↔1 coherence factor after `duration`.
    pub erasure_target: f64,
    pub integration_window: f64,
    pub signal_noise: f64,
    pub snr_threshold: f64,
}

impl Default for ReadoutSection {
    fn default() -> Self {
        Self {
            amplitude: None,
            duration: 0.15,
            ring_down: 0.3,
            erasure_target: 0.005,
            integration_window: 1.2,
            signal_noise: 0.1,
            snr_threshold: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChiCurveParams {
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
}

impl Default for ChiCurveParams {
    fn default() -> Self {
        Self { delta_min: -800.0, delta_max: -150.0, points: 651 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectroscopyParams {
    /// Half width of the frequency window around the |0⟩/|1⟩ midpoint (MHz).
    pub half_width: f64,
    pub points: usize,
    /// Second device, identical except for f01, for comparison.
    pub reference_f01: f64,
    /// Also emit curves with relaxation during the integration window.
    pub relaxation: bool,
}

impl Default for SpectroscopyParams {
    fn default() -> Self {
        Self { half_width: 5.0, points: 801, reference_f01: 6750.0, relaxation: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpiralParams {
    /// f01 values relative to the configured device (MHz).
    pub f01_offsets: Vec<f64>,
    pub readout_max: f64,
    pub points: usize,
    /// Fixed time from preparation to tomography (µs).
    pub total_time: f64,
}

impl Default for SpiralParams {
    fn default() -> Self {
        Self { f01_offsets: vec![0.0, 10.0, 25.0, 50.0, -50.0], readout_max: 1.5, points: 31, total_time: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RamseyParams {
    pub delay_max: f64,
    pub points: usize,
    /// Detuning of the π/2 pulses from the transition (MHz).
    pub detuning: f64,
    /// Idle time between the end of the inserted readout and the second pulse.
    pub readout_gap: f64,
}

impl Default for RamseyParams {
    fn default() -> Self {
        Self { delay_max: 20.0, points: 201, detuning: 1.0, readout_gap: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TomographyParams {
    /// Time between preparation and tomography pulses (µs).
    pub delay: f64,
}

impl Default for TomographyParams {
    fn default() -> Self {
        Self { delay: 0.45 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContextualityParams {
    pub haar_states: usize,
}

impl Default for ContextualityParams {
    fn default() -> Self {
        Self { haar_states: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweetSpotParams {
    pub alphas: Vec<f64>,
    /// Photon manifolds n = 0..manifolds for the photon-number study.
    pub manifolds: usize,
    /// (f01, α) pairs to invert into transmon parameters.
    pub transmon_targets: Vec<(f64, f64)>,
}

impl Default for SweetSpotParams {
    fn default() -> Self {
        Self {
            alphas: ANHARMONICITIES.to_vec(),
            manifolds: 4,
            transmon_targets: vec![(6901.0, -314.0), (6906.0, -310.0)],
        }
    }
}

/// The config file as written by the user.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub device: DeviceSection,
    pub noise: NoiseSection,
    pub readout: ReadoutSection,
    /// Shots per tomography setting; exact expectations when absent.
    pub shots: Option<u64>,
    pub chi_curve: ChiCurveParams,
    pub spectroscopy: SpectroscopyParams,
    pub spiral: SpiralParams,
    pub ramsey: RamseyParams,
    pub tomography: TomographyParams,
    pub contextuality: ContextualityParams,
    pub sweet_spot: SweetSpotParams,
    /// Output directory; the command line takes precedence.
    pub out_dir: Option<String>,
}

/// Everything an experiment needs, with presets expanded and the readout
/// drive calibrated. This is what gets recorded and hashed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolvedConfig {
    pub device: DeviceParams,
    pub noise: NoiseParams,
    /// Readout of the configured device with the fixed pulse length.
    pub readout: ReadoutConfig,
    pub ring_down: f64,
    pub erasure_target: f64,
    pub shots: Option<u64>,
    pub chi_curve: ChiCurveParams,
    pub spectroscopy: SpectroscopyParams,
    pub spiral: SpiralParams,
    pub ramsey: RamseyParams,
    pub tomography: TomographyParams,
    pub contextuality: ContextualityParams,
    pub sweet_spot: SweetSpotParams,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Noiseless variant: no intrinsic decoherence, exact expectations.
    pub fn noiseless() -> Self {
        Self { noise: NoiseSection { preset: NoisePreset::None, ..Default::default() }, ..Default::default() }
    }

    pub fn resolve(&self) -> Result<ResolvedConfig> {
        self.validate()?;
        let device = resolve_device(&self.device)?;
        let noise = resolve_noise(&self.noise)?;
        let readout = resolve_readout(&self.readout, &device)?;
        Ok(ResolvedConfig {
            device,
            noise,
            readout,
            ring_down: self.readout.ring_down,
            erasure_target: self.readout.erasure_target,
            shots: self.shots,
            chi_curve: self.chi_curve,
            spectroscopy: self.spectroscopy,
            spiral: self.spiral.clone(),
            ramsey: self.ramsey,
            tomography: self.tomography,
            contextuality: self.contextuality,
            sweet_spot: self.sweet_spot.clone(),
        })
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let c = &self.chi_curve;
        if !(c.delta_min < c.delta_max) || c.points < 2 {
            return bad(format!("chi_curve needs delta_min < delta_max and ≥ 2 points, got {c:?}"));
        }
        let s = &self.spectroscopy;
        if !(s.half_width > 0.0) || s.points < 2 {
            return bad("spectroscopy needs half_width > 0 and ≥ 2 points".into());
        }
        let sp = &self.spiral;
        if sp.f01_offsets.is_empty() || sp.points < 2 || !(sp.readout_max > 0.0) || !(sp.total_time >= sp.readout_max) {
            return bad("spiral needs f01 offsets, ≥ 2 points and 0 < readout_max ≤ total_time".into());
        }
        let r = &self.ramsey;
        if !(r.delay_max > r.readout_gap) || r.points < 8 || !(r.readout_gap >= 0.0) || !r.detuning.is_finite() {
            return bad("ramsey needs delay_max > readout_gap ≥ 0, ≥ 8 points and a finite detuning".into());
        }
        if !(self.tomography.delay >= self.readout.duration + self.readout.ring_down) {
            return bad(format!(
                "tomography delay {} is shorter than readout plus ring-down ({} + {})",
                self.tomography.delay, self.readout.duration, self.readout.ring_down
            ));
        }
        if !(self.readout.duration > 0.0) || !(self.readout.ring_down >= 0.0) {
            return bad("readout duration must be positive and ring_down non-negative".into());
        }
        if self.shots == Some(0) {
            return bad("shots must be positive when given".into());
        }
        if self.sweet_spot.alphas.is_empty() {
            return bad("sweet_spot needs at least one anharmonicity".into());
        }
        Ok(())
    }
}

fn resolve_device(section: &DeviceSection) -> Result<DeviceParams> {
    if let Some(params) = &section.params {
        let others = section.f_r.is_some()
            || section.g.is_some()
            || section.alpha.is_some()
            || section.f01.is_some()
            || section.kappa.is_some()
            || section.transmon.is_some()
            || section.preset != DevicePreset::default();
        if others {
            return Err(Error::Config("device.params excludes the preset and individual overrides".into()));
        }
        params.validate()?;
        return Ok(params.clone());
    }
    let f_r = section.f_r.unwrap_or(CAVITY_FREQUENCY);
    let g = section.g.unwrap_or(COUPLING);
    let kappa = section.kappa.unwrap_or(f_r / OUTPUT_Q);
    let (preset_f01, preset_alpha) = match section.preset {
        DevicePreset::ModelSweetSpot => (None, -310.0),
        DevicePreset::Measured6901 => (Some(6901.0), -314.0),
        DevicePreset::Measured6906 => (Some(6906.0), -310.0),
        DevicePreset::OffSweetSpot => (Some(6750.0), -310.0),
    };
    let alpha = section.alpha.unwrap_or(preset_alpha);
    let mut device = DeviceParams::duffing(f_r, g, f_r + alpha, alpha, kappa);
    if let Some(spec) = section.transmon {
        device.levels = crate::device::LevelModel::Transmon(spec);
        if section.f01.is_some() || section.alpha.is_some() {
            return Err(Error::Config("a transmon device takes f01 and α from E_J and E_C".into()));
        }
        device.validate()?;
        return Ok(device);
    }
    let f01 = match section.f01.or(preset_f01) {
        Some(f) => f,
        None => model_sweet_spot(&device)?,
    };
    let device = DeviceParams::duffing(f_r, g, f01, alpha, kappa);
    device.validate()?;
    Ok(device)
}

/// f01 at the exact χ12 root, searched within ±100 MHz of δ = α.
pub fn model_sweet_spot(device: &DeviceParams) -> Result<f64> {
    let alpha = device.alpha()?;
    let bracket = (alpha - 100.0, alpha + 100.0);
    Ok(find_sweet_spot(device, bracket, SweetSpotMode::Exact)?.f01)
}

fn resolve_noise(section: &NoiseSection) -> Result<NoiseParams> {
    let base = match section.preset {
        NoisePreset::Measured => NoiseParams::new(MEASURED_T1_01, MEASURED_T2_01, MEASURED_T2_12, MEASURED_N_TH)?,
        NoisePreset::Quoted => NoiseParams::new(MEASURED_T1_01, MEASURED_T2_01, QUOTED_T2_12, MEASURED_N_TH)?,
        NoisePreset::None => NoiseParams::noiseless(),
    };
    let noise = NoiseParams {
        t1_01: section.t1_01.unwrap_or(base.t1_01),
        t2_01: section.t2_01.unwrap_or(base.t2_01),
        t2_12: section.t2_12.unwrap_or(base.t2_12),
        n_th: section.n_th.unwrap_or(base.n_th),
        t1_12: section.t1_12.or(base.t1_12),
        t2_02: section.t2_02.or(base.t2_02),
    };
    noise.rates()?;
    Ok(noise)
}

/// Readout of `device` with the section's pulse and noise settings and the
/// given amplitude.
pub fn readout_for(section: &ReadoutSection, device: &DeviceParams, amplitude: f64) -> Result<ReadoutConfig> {
    let pulls = dressed_cavity_pull(device)?.pulls;
    if pulls.len() < 3 {
        return Err(Error::Config("readout needs a device with at least three levels".into()));
    }
    let mut cfg =
        ReadoutConfig::new(device.f_r, [pulls[0], pulls[1], pulls[2]], device.kappa, amplitude, section.duration);
    cfg.integration_window = section.integration_window;
    cfg.signal_noise = section.signal_noise;
    cfg.snr_threshold = section.snr_threshold;
    cfg.validate()?;
    Ok(cfg)
}

fn resolve_readout(section: &ReadoutSection, device: &DeviceParams) -> Result<ReadoutConfig> {
    let cfg = readout_for(section, device, section.amplitude.unwrap_or(0.0))?;
    if section.amplitude.is_some() {
        return Ok(cfg);
    }
    let eps = calibrate_amplitude(&cfg, section.duration, section.erasure_target)?;
    Ok(cfg.with_amplitude(eps))
}

impl ResolvedConfig {
    /// Canonical JSON of the resolved config.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(serde_json::to_string(self)?.as_bytes())))
    }

    /// Same device with a different f01 (Duffing devices only).
    pub fn device_at(&self, f01: f64) -> Result<DeviceParams> {
        let alpha = self.device.alpha()?;
        let d = DeviceParams { levels: crate::device::LevelModel::Duffing { f01, alpha }, ..self.device.clone() };
        d.validate()?;
        Ok(d)
    }

    /// Readout of another device with this config's drive amplitude, pulse
    /// and detector settings; the drive frequency tracks that device's lines.
    pub fn readout_at(&self, device: &DeviceParams, duration: f64) -> Result<ReadoutConfig> {
        let section = ReadoutSection {
            amplitude: Some(self.readout.amplitude),
            duration,
            ring_down: self.ring_down,
            erasure_target: self.erasure_target,
            integration_window: self.readout.integration_window,
            signal_noise: self.readout.signal_noise,
            snr_threshold: self.readout.snr_threshold,
        };
        readout_for(&section, device, self.readout.amplitude)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err =
            ExperimentConfig::from_json(r#"{"device": {"preset": "model_sweet_spot", "colour": 1}}"#).unwrap_err();
        assert!(err.is_config_error());
        let err = ExperimentConfig::from_json(r#"{"ramsay": {}}"#).unwrap_err();
        assert!(err.is_config_error());
    }

    #[test]
    fn empty_object_gives_defaults() {
        assert_eq!(ExperimentConfig::from_json("{}").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn model_sweet_spot_has_equal_upper_pulls() {
        let r = ExperimentConfig::default().resolve().unwrap();
        let p = r.readout.pulls;
        assert!((p[1] - p[2]).abs() < 1e-9, "pulls {p:?}");
        assert!((r.device.f01().unwrap() - 6877.23).abs() < 0.05);
    }

    #[test]
    fn calibrated_drive_meets_the_erasure_target() {
        let r = ExperimentConfig::default().resolve().unwrap();
        let (d01, _) = crate::readout::dephasing_and_phase(&r.readout, 0, 1);
        assert!((d01 - 0.005).abs() < 1e-6, "D01 = {d01}");
        assert!((r.readout.kappa - 7182.0 / 4200.0).abs() < 1e-12);
    }

    #[test]
    fn presets_resolve_to_their_frequencies() {
        let cfg = |preset| ExperimentConfig {
            device: DeviceSection { preset, ..Default::default() },
            readout: ReadoutSection { amplitude: Some(10.0), ..Default::default() },
            ..Default::default()
        };
        let d = cfg(DevicePreset::Measured6901).resolve().unwrap().device;
        assert_eq!((d.f01().unwrap(), d.alpha().unwrap()), (6901.0, -314.0));
        let d = cfg(DevicePreset::OffSweetSpot).resolve().unwrap().device;
        assert_eq!(d.f01().unwrap(), 6750.0);
    }

    #[test]
    fn explicit_params_exclude_overrides() {
        let params = DeviceParams::duffing(7182.0, 20.0, 6900.0, -310.0, 1.7);
        let section = DeviceSection { params: Some(params.clone()), g: Some(10.0), ..Default::default() };
        assert!(resolve_device(&section).unwrap_err().is_config_error());
        let section = DeviceSection { params: Some(params.clone()), ..Default::default() };
        assert_eq!(resolve_device(&section).unwrap(), params);
    }

    #[test]
    fn invalid_ranges_are_config_errors() {
        let mut cfg = ExperimentConfig::default();
        cfg.chi_curve.delta_max = cfg.chi_curve.delta_min;
        assert!(cfg.resolve().unwrap_err().is_config_error());
        let mut cfg = ExperimentConfig::default();
        cfg.tomography.delay = 0.2;
        assert!(cfg.resolve().unwrap_err().is_config_error());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::default().resolve().unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.shots = Some(100);
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
        assert_eq!(a.hash().unwrap().len(), 64);
    }
}
