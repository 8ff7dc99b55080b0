//! Ramsey fringes of the 0↔1 and 1↔2 transitions, with and without a
//! readout pulse inside the delay.
//!
//! The inserted readout starts right after the first π/2 pulse and ends
//! `readout_gap` before the second one, so it is only possible for delays
//! longer than the gap plus the configured pulse length.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::ResolvedConfig;
use super::output::{OutputSink, Plot, Series, Table};
use super::sim::{chain, evolve, free, prepare, readout_superop, stream, unitary_superop, written, Detector};
use crate::control::{PulseSequence, Rotation};
use crate::error::{Error, Result};
use crate::numerics::levenberg_marquardt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transition {
    #[serde(rename = "01")]
    ZeroOne,
    #[serde(rename = "12")]
    OneTwo,
}

impl Transition {
    pub fn label(self) -> &'static str {
        match self {
            Transition::ZeroOne => "01",
            Transition::OneTwo => "12",
        }
    }

    fn levels(self) -> (usize, usize) {
        match self {
            Transition::ZeroOne => (0, 1),
            Transition::OneTwo => (1, 2),
        }
    }

    fn half_pi(self) -> PulseSequence {
        match self {
            Transition::ZeroOne => written(vec![Rotation::x01(PI / 2.0)]),
            Transition::OneTwo => written(vec![Rotation::x12(PI / 2.0)]),
        }
    }

    /// State before the first π/2 pulse.
    fn start(self) -> PulseSequence {
        match self {
            Transition::ZeroOne => PulseSequence::identity(),
            Transition::OneTwo => written(vec![Rotation::x01(PI)]),
        }
    }
}

/// Fitted fringe parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FringeFit {
    pub t2: f64,
    pub detuning: f64,
    /// Background amplitude B and offset C (1↔2 form only).
    pub background: Option<(f64, f64)>,
    pub rms_residual: f64,
}

#[derive(Debug, Clone)]
pub struct RamseyTrace {
    pub transition: Transition,
    pub with_readout: bool,
    pub delays: Vec<f64>,
    /// Population of the upper level of the transition after the second pulse.
    pub population: Vec<f64>,
    /// |ρ_ij| of the transition just before the second pulse.
    pub coherence: Vec<f64>,
    pub fit: Option<FringeFit>,
}

impl RamseyTrace {
    pub fn max_coherence(&self) -> f64 {
        self.coherence.iter().copied().fold(0.0, f64::max)
    }
}

/// ½(e^{−t/T2} cos 2πΔt + 1).
pub fn fringe_01(p: &[f64], t: f64) -> f64 {
    0.5 * ((-t / p[0]).exp() * (2.0 * PI * p[1] * t).cos() + 1.0)
}

/// ½(e^{−t/T2} cos 2πΔt + B e^{−t/T1} + C).
pub fn fringe_12(p: &[f64], t: f64, t1: f64) -> f64 {
    0.5 * ((-t / p[0]).exp() * (2.0 * PI * p[1] * t).cos() + p[2] * (-t / t1).exp() + p[3])
}

pub fn fit_fringe(
    transition: Transition,
    delays: &[f64],
    population: &[f64],
    detuning: f64,
    t1: f64,
) -> Result<FringeFit> {
    let span = delays.last().copied().unwrap_or(1.0) - delays.first().copied().unwrap_or(0.0);
    let guess_t2 = 0.5 * span;
    let (params, rss) = match transition {
        Transition::ZeroOne => {
            let fit = levenberg_marquardt(fringe_01, delays, population, &[guess_t2, detuning], 500)?;
            (fit.params, fit.rss)
        }
        Transition::OneTwo => {
            let model = |p: &[f64], t: f64| fringe_12(p, t, t1);
            let fit = levenberg_marquardt(model, delays, population, &[guess_t2, detuning, 1.0, 0.0], 500)?;
            (fit.params, fit.rss)
        }
    };
    if !(params[0] > 0.0) || !params[0].is_finite() {
        return Err(Error::NoConvergence(format!("Ramsey fit returned T2 = {}", params[0])));
    }
    Ok(FringeFit {
        t2: params[0],
        detuning: params[1].abs(),
        background: (params.len() == 4).then(|| (params[2], params[3])),
        rms_residual: (rss / delays.len() as f64).sqrt(),
    })
}

pub fn trace(r: &ResolvedConfig, transition: Transition, with_readout: bool, seed: u64) -> Result<RamseyTrace> {
    let p = &r.ramsey;
    let (det01, det12) = match transition {
        Transition::ZeroOne => (p.detuning, 0.0),
        Transition::OneTwo => (0.0, p.detuning),
    };
    let (i, j) = transition.levels();
    let rho0 = prepare(&transition.start())?;
    let pulse = unitary_superop(&transition.half_pi());
    let detector = Detector { shots: r.shots };
    let min_delay = p.readout_gap + r.readout.duration;
    let mut out = RamseyTrace {
        transition,
        with_readout,
        delays: Vec::new(),
        population: Vec::new(),
        coherence: Vec::new(),
        fit: None,
    };
    for k in 0..p.points {
        let delay = p.delay_max * k as f64 / (p.points - 1) as f64;
        let wait = if with_readout {
            if delay < min_delay - 1e-12 {
                continue;
            }
            let length = delay - p.readout_gap;
            let readout = readout_superop(&r.readout.with_duration(length))?;
            let during = free(&r.noise, length, det01, det12)?;
            let gap = free(&r.noise, p.readout_gap, det01, det12)?;
            chain(&[&during, &readout, &gap])
        } else {
            free(&r.noise, delay, det01, det12)?
        };
        let before = evolve(&chain(&[&pulse, &wait]), rho0.matrix());
        let after = evolve(&pulse, &before);
        let mut rng = stream(seed, k as u64);
        let pops = detector.populations(&after, &mut rng)?;
        out.delays.push(delay);
        out.population.push(pops[j]);
        out.coherence.push(before[(i, j)].norm());
    }
    let fringes_visible = !(with_readout && transition == Transition::ZeroOne);
    if fringes_visible {
        out.fit = Some(fit_fringe(transition, &out.delays, &out.population, p.detuning, r.noise.t1_01)?);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Ramsey {
    pub traces: Vec<RamseyTrace>,
}

impl Ramsey {
    pub fn get(&self, transition: Transition, with_readout: bool) -> Option<&RamseyTrace> {
        self.traces.iter().find(|t| t.transition == transition && t.with_readout == with_readout)
    }

    /// Relative change of the fitted 1↔2 T2 caused by the inserted readout.
    pub fn readout_t2_change_12(&self) -> Option<f64> {
        let a = self.get(Transition::OneTwo, false)?.fit?.t2;
        let b = self.get(Transition::OneTwo, true)?.fit?.t2;
        Some((b - a).abs() / a)
    }
}

pub fn compute(r: &ResolvedConfig, seed: u64) -> Result<Ramsey> {
    let mut traces = Vec::new();
    for (n, (t, ro)) in [
        (Transition::ZeroOne, false),
        (Transition::ZeroOne, true),
        (Transition::OneTwo, false),
        (Transition::OneTwo, true),
    ]
    .into_iter()
    .enumerate()
    {
        traces.push(trace(r, t, ro, seed.wrapping_add(n as u64 * 0x9E37_79B9))?);
    }
    Ok(Ramsey { traces })
}

pub fn write(ramsey: &Ramsey, r: &ResolvedConfig, sink: &mut OutputSink) -> Result<BTreeMap<String, f64>> {
    let mut summary = BTreeMap::new();
    for t in &ramsey.traces {
        let stem = format!("ramsey_{}{}", t.transition.label(), if t.with_readout { "_readout" } else { "" });
        let mut table = Table::new(&["delay", "population", "fit", "coherence"]);
        let fitted: Vec<f64> = t
            .delays
            .iter()
            .map(|&d| match (t.fit, t.transition) {
                (Some(f), Transition::ZeroOne) => fringe_01(&[f.t2, f.detuning], d),
                (Some(f), Transition::OneTwo) => {
                    let (b, c) = f.background.unwrap_or((0.0, 0.0));
                    fringe_12(&[f.t2, f.detuning, b, c], d, r.noise.t1_01)
                }
                (None, _) => f64::NAN,
            })
            .collect();
        for k in 0..t.delays.len() {
            table.push(vec![t.delays[k], t.population[k], fitted[k], t.coherence[k]]);
        }
        sink.csv(&format!("{stem}.csv"), &table)?;
        let mut plot = Plot::new(&stem, "delay (us)", "population").with(Series::scatter(
            "simulated",
            t.delays.clone(),
            t.population.clone(),
        ));
        if t.fit.is_some() {
            plot = plot.with(Series::line("fit", t.delays.clone(), fitted));
        }
        sink.svg(&format!("{stem}.svg"), &plot)?;
        if let Some(f) = t.fit {
            summary.insert(format!("{stem}_t2"), f.t2);
            summary.insert(format!("{stem}_detuning"), f.detuning);
            summary.insert(format!("{stem}_rms_residual"), f.rms_residual);
        }
        summary.insert(format!("{stem}_max_coherence"), t.max_coherence());
    }
    if let Some(c) = ramsey.readout_t2_change_12() {
        summary.insert("ramsey_12_readout_t2_change".into(), c);
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;

    #[test]
    fn fringe_fit_recovers_synthetic_parameters() {
        let t: Vec<f64> = (0..150).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|&x| fringe_01(&[8.0, 1.1], x)).collect();
        let f = fit_fringe(Transition::ZeroOne, &t, &y, 1.0, 15.0).unwrap();
        assert!((f.t2 - 8.0).abs() < 1e-6 && (f.detuning - 1.1).abs() < 1e-6);
    }

    #[test]
    fn noiseless_fringes_do_not_decay() {
        let mut cfg = ExperimentConfig::noiseless();
        cfg.ramsey.points = 41;
        let r = cfg.resolve().unwrap();
        let t = trace(&r, Transition::ZeroOne, false, 0).unwrap();
        for (d, p) in t.delays.iter().zip(&t.population) {
            let expect = 0.5 * ((2.0 * PI * r.ramsey.detuning * d).cos() + 1.0);
            assert!((p - expect).abs() < 1e-9);
        }
    }

    #[test]
    fn inserted_readout_skips_short_delays() {
        let mut cfg = ExperimentConfig::default();
        cfg.ramsey.points = 41;
        let r = cfg.resolve().unwrap();
        let t = trace(&r, Transition::ZeroOne, true, 0).unwrap();
        assert!(t.delays.iter().all(|&d| d >= 2.15 - 1e-12));
        assert!(t.max_coherence() < 0.01);
    }
}
