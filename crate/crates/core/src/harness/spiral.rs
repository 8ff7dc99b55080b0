//! ρ12 after a readout pulse of variable length, for several qutrit
//! frequencies. Off the χ12 root the readout dephases and rotates ρ12, so the
//! trajectory spirals inward; at the root it stays put.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::config::ResolvedConfig;
use super::output::{OutputSink, Plot, Series, Table};
use super::sim::{chain, evolve, free, prepare, readout_superop, state_design, stream, written, Detector};
use crate::control::Rotation;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub f01: f64,
    pub chi12: f64,
    pub lengths: Vec<f64>,
    pub rho12: Vec<(f64, f64)>,
}

impl Trajectory {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.rho12.iter().map(|(re, im)| re.hypot(*im)).collect()
    }

    /// Continuous phase of ρ12 along the trajectory.
    pub fn unwrapped_phase(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(self.rho12.len());
        for &(re, im) in &self.rho12 {
            let mut phi = im.atan2(re);
            if let Some(&prev) = out.last() {
                while phi - prev > PI {
                    phi -= 2.0 * PI;
                }
                while phi - prev < -PI {
                    phi += 2.0 * PI;
                }
            }
            out.push(phi);
        }
        out
    }

    /// Largest |ρ12| deviation from the zero-length point.
    pub fn magnitude_change(&self) -> f64 {
        let m = self.magnitudes();
        m.iter().map(|v| (v - m[0]).abs()).fold(0.0, f64::max)
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.magnitudes().windows(2).all(|w| w[1] < w[0])
    }

    /// True when every step turns the phase the same way.
    pub fn monotonic_phase(&self) -> bool {
        let phi = self.unwrapped_phase();
        let steps: Vec<f64> = phi.windows(2).map(|w| w[1] - w[0]).collect();
        steps.iter().all(|&s| s > 0.0) || steps.iter().all(|&s| s < 0.0)
    }

    pub fn total_winding(&self) -> f64 {
        let phi = self.unwrapped_phase();
        phi[phi.len() - 1] - phi[0]
    }
}

pub fn compute(r: &ResolvedConfig, seed: u64) -> Result<Vec<Trajectory>> {
    let p = &r.spiral;
    let rho0 = prepare(&written(vec![Rotation::x12(PI / 2.0), Rotation::x01(PI)]))?;
    let design = state_design()?;
    let detector = Detector { shots: r.shots };
    let f01_0 = r.device.f01()?;
    let mut out = Vec::new();
    for (j, offset) in p.f01_offsets.iter().enumerate() {
        let device = r.device_at(f01_0 + offset)?;
        let base = r.readout_at(&device, 0.0)?;
        let mut traj = Trajectory {
            f01: f01_0 + offset,
            chi12: 0.5 * (base.pulls[2] - base.pulls[1]),
            lengths: Vec::new(),
            rho12: Vec::new(),
        };
        for k in 0..p.points {
            let length = p.readout_max * k as f64 / (p.points - 1) as f64;
            let cfg = base.with_duration(length);
            let readout = readout_superop(&cfg)?;
            let during = free(&r.noise, length, 0.0, 0.0)?;
            let after = free(&r.noise, p.total_time - length, 0.0, 0.0)?;
            let s = chain(&[&during, &readout, &after]);
            let rho = evolve(&s, rho0.matrix());
            let mut rng = stream(seed, (j * p.points + k) as u64);
            let est = detector.reconstruct(&design, &rho, &mut rng)?;
            let c = est.get(1, 2);
            traj.lengths.push(length);
            traj.rho12.push((c.re, c.im));
        }
        out.push(traj);
    }
    Ok(out)
}

pub fn write(trajectories: &[Trajectory], sink: &mut OutputSink) -> Result<BTreeMap<String, f64>> {
    let mut table = Table::new(&["f01", "readout_length", "re_rho12", "im_rho12", "abs_rho12", "phase_rho12"]);
    let mut plot = Plot::new("rho12 versus readout length", "Re rho12", "Im rho12");
    let mut summary = BTreeMap::new();
    for (j, t) in trajectories.iter().enumerate() {
        let phase = t.unwrapped_phase();
        for k in 0..t.lengths.len() {
            let (re, im) = t.rho12[k];
            table.push(vec![t.f01, t.lengths[k], re, im, re.hypot(im), phase[k]]);
        }
        let name = format!("f01 = {:.2}", t.f01);
        plot = plot.with(Series::line(
            &name,
            t.rho12.iter().map(|c| c.0).collect(),
            t.rho12.iter().map(|c| c.1).collect(),
        ));
        summary.insert(format!("trajectory_{j}_f01"), t.f01);
        summary.insert(format!("trajectory_{j}_chi12"), t.chi12);
        summary.insert(format!("trajectory_{j}_magnitude_change"), t.magnitude_change());
        summary.insert(format!("trajectory_{j}_winding"), t.total_winding());
        summary.insert(format!("trajectory_{j}_strictly_decreasing"), f64::from(u8::from(t.strictly_decreasing())));
        summary.insert(format!("trajectory_{j}_monotonic_phase"), f64::from(u8::from(t.monotonic_phase())));
    }
    sink.csv("spiral.csv", &table)?;
    sink.svg("spiral.svg", &plot)?;
    Ok(summary)
}
