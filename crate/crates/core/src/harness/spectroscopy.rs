//! Cavity transmission after preparing |0⟩, |1⟩ and |2⟩ with pulses.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::config::ResolvedConfig;
use super::output::{OutputSink, Plot, Series, Table};
use super::sim::{prepare, written};
use crate::control::{PulseSequence, Rotation};
use crate::device::DeviceParams;
use crate::error::{Error, Result};
use crate::readout::transmission_spectrum;

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub f01: f64,
    pub pulls: [f64; 3],
    pub table: Table,
    /// Largest pointwise |A₁ − A₂| of the relaxation-free curves.
    pub max_diff_12: f64,
    /// Grid frequency of the maximum of each relaxation-free curve.
    pub peaks: [f64; 3],
}

#[derive(Debug, Clone)]
pub struct Spectroscopy {
    pub device: Spectrum,
    pub reference: Spectrum,
}

/// Preparation pulses for |0⟩, |1⟩ and |2⟩.
pub fn level_preparations() -> [PulseSequence; 3] {
    [PulseSequence::identity(), written(vec![Rotation::x01(PI)]), written(vec![Rotation::x12(PI), Rotation::x01(PI)])]
}

fn prepared_level(seq: &PulseSequence) -> Result<usize> {
    let pops = prepare(seq)?.populations();
    (0..3)
        .find(|&k| pops[k] > 1.0 - 1e-12)
        .ok_or_else(|| Error::InvalidParameter(format!("preparation does not reach a basis state: {pops:?}")))
}

fn spectrum(r: &ResolvedConfig, device: &DeviceParams, freqs: &[f64]) -> Result<Spectrum> {
    let cfg = r.readout_at(device, r.readout.duration)?;
    let mut curves = Vec::new();
    for seq in level_preparations() {
        let level = prepared_level(&seq)?;
        let clean = transmission_spectrum(&cfg, level, None, freqs)?;
        let relaxed = if r.spectroscopy.relaxation {
            transmission_spectrum(&cfg, level, Some(&r.noise), freqs)?.iter().map(|p| p.amplitude).collect()
        } else {
            vec![f64::NAN; freqs.len()]
        };
        curves.push((clean.iter().map(|p| p.amplitude).collect::<Vec<f64>>(), relaxed));
    }
    let mut table =
        Table::new(&["frequency", "amp_0", "amp_1", "amp_2", "amp_0_relaxed", "amp_1_relaxed", "amp_2_relaxed"]);
    for (k, &f) in freqs.iter().enumerate() {
        table.push(vec![
            f,
            curves[0].0[k],
            curves[1].0[k],
            curves[2].0[k],
            curves[0].1[k],
            curves[1].1[k],
            curves[2].1[k],
        ]);
    }
    let max_diff_12 = curves[1].0.iter().zip(&curves[2].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let peaks = [0, 1, 2].map(|i| {
        let c = &curves[i].0;
        let k = (0..c.len()).max_by(|&a, &b| c[a].total_cmp(&c[b])).unwrap_or(0);
        freqs[k]
    });
    Ok(Spectrum { f01: device.f01()?, pulls: cfg.pulls, table, max_diff_12, peaks })
}

pub fn compute(r: &ResolvedConfig) -> Result<Spectroscopy> {
    let p = &r.spectroscopy;
    let pulls = r.readout.pulls;
    let centre = r.device.f_r + 0.5 * (pulls[0] + pulls[1]);
    let freqs: Vec<f64> =
        (0..p.points).map(|k| centre - p.half_width + 2.0 * p.half_width * k as f64 / (p.points - 1) as f64).collect();
    Ok(Spectroscopy {
        device: spectrum(r, &r.device, &freqs)?,
        reference: spectrum(r, &r.device_at(p.reference_f01)?, &freqs)?,
    })
}

fn plot(s: &Spectrum, title: &str) -> Plot {
    let col = |n: &str| s.table.column(n).unwrap_or_default();
    let mut plot = Plot::new(title, "drive frequency (MHz)", "transmitted amplitude");
    for k in 0..3 {
        plot = plot.with(Series::line(&format!("|{k}>"), col("frequency"), col(&format!("amp_{k}"))));
    }
    plot
}

pub fn write(s: &Spectroscopy, sink: &mut OutputSink) -> Result<BTreeMap<String, f64>> {
    sink.csv("spectroscopy.csv", &s.device.table)?;
    sink.csv("spectroscopy_reference.csv", &s.reference.table)?;
    sink.svg("spectroscopy.svg", &plot(&s.device, &format!("f01 = {:.2} MHz", s.device.f01)))?;
    sink.svg("spectroscopy_reference.svg", &plot(&s.reference, &format!("f01 = {:.2} MHz", s.reference.f01)))?;
    let mut out = BTreeMap::new();
    for (name, sp) in [("device", &s.device), ("reference", &s.reference)] {
        out.insert(format!("{name}_f01"), sp.f01);
        out.insert(format!("{name}_max_diff_12"), sp.max_diff_12);
        out.insert(format!("{name}_pull_splitting_12"), sp.pulls[2] - sp.pulls[1]);
        for k in 0..3 {
            out.insert(format!("{name}_peak_{k}"), sp.peaks[k]);
        }
    }
    Ok(out)
}
