//! χ12 and χ01 versus detuning, perturbative and exact.

use std::collections::BTreeMap;

use super::config::ResolvedConfig;
use super::output::{OutputSink, Plot, Series, Table};
use crate::device::{dispersive_shifts_2nd_order, dressed_cavity_pull, find_sweet_spot, SweetSpotMode};
use crate::error::{Error, Result};

/// Above this |g/δ| the two curves are not compared.
pub const WEAK_COUPLING: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct ChiCurve {
    pub table: Table,
    pub crossing_second_order: f64,
    pub crossing_exact: f64,
    /// Largest |exact − perturbative| / |exact| for χ12 where |g/δ| ≤ 0.05.
    pub weak_coupling_deviation: f64,
    /// Points where the exact labelling failed.
    pub unlabelled_points: usize,
}

pub fn compute(r: &ResolvedConfig) -> Result<ChiCurve> {
    let p = &r.chi_curve;
    let device = &r.device;
    let alpha = device.alpha()?;
    let g = device.g;
    let mut table =
        Table::new(&["delta", "f01", "chi12_second_order", "chi12_exact", "chi01_second_order", "chi01_exact"]);
    let mut unlabelled = 0;
    let mut weak_dev: f64 = 0.0;
    let mut exact_prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    for k in 0..p.points {
        let delta = p.delta_min + (p.delta_max - p.delta_min) * k as f64 / (p.points - 1) as f64;
        let (so12, so01) = match dispersive_shifts_2nd_order(g, delta, alpha) {
            Ok(s) => (s.chi12, s.chi01),
            Err(Error::Singular(_)) => (f64::NAN, f64::NAN),
            Err(e) => return Err(e),
        };
        let (ex12, ex01) = match dressed_cavity_pull(&device.with_delta(delta)?) {
            Ok(d) => (d.chi12.unwrap_or(f64::NAN), d.chi01),
            Err(Error::AmbiguousLabel { .. }) => {
                unlabelled += 1;
                (f64::NAN, f64::NAN)
            }
            Err(e) => return Err(e),
        };
        if (g / delta).abs() <= WEAK_COUPLING && so12.is_finite() && ex12.is_finite() {
            weak_dev = weak_dev.max((ex12 - so12).abs() / ex12.abs());
        }
        if ex12.is_finite() {
            if let Some((d0, c0)) = exact_prev {
                if bracket.is_none() && c0.signum() != ex12.signum() {
                    bracket = Some((d0, delta));
                }
            }
            exact_prev = Some((delta, ex12));
        }
        table.push(vec![delta, device.f_r + delta, so12, ex12, so01, ex01]);
    }
    let (lo, hi) =
        bracket.ok_or(Error::NoSignChange { quantity: "exact χ12".into(), lo: p.delta_min, hi: p.delta_max })?;
    let crossing_exact = find_sweet_spot(device, (lo, hi), SweetSpotMode::Exact)?.delta;
    let crossing_second_order = if alpha > p.delta_min && alpha < p.delta_max {
        find_sweet_spot(device, (p.delta_min, p.delta_max), SweetSpotMode::SecondOrder)?.delta
    } else {
        f64::NAN
    };
    Ok(ChiCurve {
        table,
        crossing_second_order,
        crossing_exact,
        weak_coupling_deviation: weak_dev,
        unlabelled_points: unlabelled,
    })
}

pub fn write(c: &ChiCurve, sink: &mut OutputSink) -> Result<BTreeMap<String, f64>> {
    sink.csv("chi_curve.csv", &c.table)?;
    let col = |n: &str| c.table.column(n).unwrap_or_default();
    let plot = Plot::new("chi12 versus detuning", "detuning (MHz)", "chi12 (MHz)")
        .with(Series::line("second order", col("delta"), col("chi12_second_order")))
        .with(Series::line("exact", col("delta"), col("chi12_exact")));
    sink.svg("chi_curve.svg", &plot)?;
    Ok(BTreeMap::from([
        ("crossing_second_order".into(), c.crossing_second_order),
        ("crossing_exact".into(), c.crossing_exact),
        ("weak_coupling_deviation".into(), c.weak_coupling_deviation),
        ("unlabelled_points".into(), c.unlabelled_points as f64),
    ]))
}
