//! Sweet-spot locations for several anharmonicities, the photon-number
//! dependence of χ12 at the sweet spot, and transmon parameters behind
//! measured (f01, α) pairs.

use std::collections::BTreeMap;

use serde::Serialize;

use super::config::{model_sweet_spot, ResolvedConfig};
use super::output::{OutputSink, Plot, Series, Table};
use crate::device::{fit_transmon, manifold_pulls, DeviceParams};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweetSpotRow {
    pub alpha: f64,
    pub delta_second_order: f64,
    pub delta_exact: f64,
    pub f01_exact: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmonRow {
    pub f01: f64,
    pub alpha: f64,
    pub e_j: f64,
    pub e_c: f64,
    pub ratio: f64,
    /// |f01 − f_r|.
    pub detuning: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweetSpotStudy {
    pub rows: Vec<SweetSpotRow>,
    /// (α, n, χ12 in the n-photon manifold) at each exact sweet spot.
    pub manifolds: Vec<(f64, usize, f64)>,
    pub transmons: Vec<TransmonRow>,
}

pub fn compute(r: &ResolvedConfig) -> Result<SweetSpotStudy> {
    let base = &r.device;
    let mut rows = Vec::new();
    let mut manifolds = Vec::new();
    for &alpha in &r.sweet_spot.alphas {
        let mut device = DeviceParams::duffing(base.f_r, base.g, base.f_r + alpha, alpha, base.kappa);
        device.n_photons = device.n_photons.max(r.sweet_spot.manifolds + 2);
        let f01 = model_sweet_spot(&device)?;
        rows.push(SweetSpotRow { alpha, delta_second_order: alpha, delta_exact: f01 - base.f_r, f01_exact: f01 });
        let at = DeviceParams::duffing(base.f_r, base.g, f01, alpha, base.kappa);
        let at = DeviceParams { n_photons: device.n_photons, ..at };
        for n in 0..=r.sweet_spot.manifolds {
            let p = manifold_pulls(&at, n)?;
            manifolds.push((alpha, n, 0.5 * (p[2] - p[1])));
        }
    }
    let transmons = r
        .sweet_spot
        .transmon_targets
        .iter()
        .map(|&(f01, alpha)| {
            let spec = fit_transmon(f01, alpha)?;
            Ok(TransmonRow {
                f01,
                alpha,
                e_j: spec.e_j,
                e_c: spec.e_c,
                ratio: spec.e_j / spec.e_c,
                detuning: (f01 - base.f_r).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweetSpotStudy { rows, manifolds, transmons })
}

pub fn write(s: &SweetSpotStudy, sink: &mut OutputSink) -> Result<BTreeMap<String, f64>> {
    let mut table = Table::new(&["alpha", "delta_second_order", "delta_exact", "f01_exact"]);
    let mut summary = BTreeMap::new();
    for row in &s.rows {
        table.push(vec![row.alpha, row.delta_second_order, row.delta_exact, row.f01_exact]);
        summary.insert(format!("f01_exact_alpha_{}", row.alpha.abs()), row.f01_exact);
        summary.insert(format!("delta_shift_alpha_{}", row.alpha.abs()), row.delta_exact - row.delta_second_order);
    }
    sink.csv("sweet_spot.csv", &table)?;
    let mut manifold_table = Table::new(&["alpha", "photons", "chi12"]);
    let mut plot = Plot::new("chi12 at the sweet spot versus photon number", "photon number", "chi12 (MHz)");
    for row in &s.rows {
        let pts: Vec<&(f64, usize, f64)> = s.manifolds.iter().filter(|m| m.0 == row.alpha).collect();
        for m in &pts {
            manifold_table.push(vec![m.0, m.1 as f64, m.2]);
        }
        plot = plot.with(Series::scatter(
            &format!("alpha = {}", row.alpha),
            pts.iter().map(|m| m.1 as f64).collect(),
            pts.iter().map(|m| m.2).collect(),
        ));
    }
    sink.csv("sweet_spot_manifolds.csv", &manifold_table)?;
    sink.svg("sweet_spot_manifolds.svg", &plot)?;
    sink.json("transmon_fits.json", &s.transmons)?;
    for t in &s.transmons {
        summary.insert(format!("e_c_{}", t.f01), t.e_c);
        summary.insert(format!("detuning_{}", t.f01), t.detuning);
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::ExperimentConfig;

    #[test]
    fn sweet_spots_sit_near_alpha_and_vanish_in_the_vacuum_manifold() {
        let mut cfg = ExperimentConfig::default();
        cfg.readout.amplitude = Some(10.0);
        let s = compute(&cfg.resolve().unwrap()).unwrap();
        assert_eq!(s.rows.len(), 3);
        for row in &s.rows {
            assert!((row.delta_exact - row.alpha).abs() < 50.0);
        }
        for m in s.manifolds.iter().filter(|m| m.1 == 0) {
            assert!(m.2.abs() < 1e-8, "{m:?}");
        }
        assert!(s.manifolds.iter().any(|m| m.1 > 0 && m.2.abs() > 1e-6));
        assert_eq!(s.transmons.len(), 2);
    }
}
