//! Generalized Jaynes-Cummings model: exact dressed cavity pulls and the
//! χ12 sweet spot.

use serde::{Deserialize, Serialize};

use super::dispersive::dispersive_shifts_2nd_order;
use super::transmon::{transmon_levels, QutritLevels, TransmonSpec};
use crate::error::{Error, Result};
use crate::numerics::brent;
use crate::qcore::{eig_hermitian, ComplexMatrix, C64};

/// Where the multilevel spectrum comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LevelModel {
    /// Uniform anharmonicity ladder.
    Duffing { f01: f64, alpha: f64 },
    /// Explicit level frequencies (MHz).
    Explicit(QutritLevels),
    /// Charge-basis transmon.
    Transmon(TransmonSpec),
}

/// Cavity + multilevel system. Frequencies in MHz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    pub f_r: f64,
    pub g: f64,
    pub levels: LevelModel,
    pub kappa: f64,
    #[serde(default = "default_truncation")]
    pub n_qutrit_levels: usize,
    #[serde(default = "default_truncation")]
    pub n_photons: usize,
}

fn default_truncation() -> usize {
    6
}

impl DeviceParams {
    pub fn duffing(f_r: f64, g: f64, f01: f64, alpha: f64, kappa: f64) -> Self {
        Self {
            f_r,
            g,
            levels: LevelModel::Duffing { f01, alpha },
            kappa,
            n_qutrit_levels: default_truncation(),
            n_photons: default_truncation(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) || !(self.kappa > 0.0) || !self.f_r.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "device needs g > 0, κ > 0 and finite f_r (g = {}, κ = {}, f_r = {})",
                self.g, self.kappa, self.f_r
            )));
        }
        if self.n_qutrit_levels < 2 || self.n_photons < 2 {
            return Err(Error::InvalidParameter(format!(
                "truncation {}×{} too small",
                self.n_qutrit_levels, self.n_photons
            )));
        }
        if let LevelModel::Transmon(spec) = &self.levels {
            spec.validate()?;
        }
        Ok(())
    }

    /// Level frequencies truncated to `n_qutrit_levels`.
    pub fn level_frequencies(&self) -> Result<QutritLevels> {
        let n = self.n_qutrit_levels;
        match &self.levels {
            LevelModel::Duffing { f01, alpha } => Ok(QutritLevels::duffing(*f01, *alpha, n)),
            LevelModel::Explicit(levels) => {
                if levels.n_levels() < n {
                    return Err(Error::InvalidParameter(format!(
                        "{} explicit levels supplied, truncation needs {n}",
                        levels.n_levels()
                    )));
                }
                QutritLevels::from_frequencies(&levels.omega[..n])
            }
            LevelModel::Transmon(spec) => transmon_levels(spec, n),
        }
    }

    pub fn f01(&self) -> Result<f64> {
        Ok(self.level_frequencies()?.f01())
    }

    pub fn alpha(&self) -> Result<f64> {
        Ok(match &self.levels {
            LevelModel::Duffing { alpha, .. } => *alpha,
            _ => {
                let mut three = self.clone();
                three.n_qutrit_levels = three.n_qutrit_levels.max(3);
                three.level_frequencies()?.alpha()
            }
        })
    }

    /// Detuning δ = f01 − f_r.
    pub fn delta(&self) -> Result<f64> {
        Ok(self.f01()? - self.f_r)
    }

    /// Same device with the primary transition moved to `f_r + delta`; the
    /// ladder keeps its shape (ω_i → ω_i + i·Δf01).
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        let mut out = self.clone();
        let shift = self.f_r + delta - self.f01()?;
        out.levels = match &self.levels {
            LevelModel::Duffing { alpha, .. } => LevelModel::Duffing { f01: self.f_r + delta, alpha: *alpha },
            _ => {
                let mut full = self.clone();
                full.n_qutrit_levels = self.n_qutrit_levels;
                LevelModel::Explicit(full.level_frequencies()?.shifted(shift))
            }
        };
        Ok(out)
    }
}

/// Basis index of |i⟩⊗|n⟩.
#[inline]
pub fn jc_index(i: usize, n: usize, n_photons: usize) -> usize {
    i * n_photons + n
}

fn build_hamiltonian(levels: &[f64], f_r: f64, g: f64, n_photons: usize, frame: f64) -> ComplexMatrix {
    let nq = levels.len();
    let dim = nq * n_photons;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..nq {
        for n in 0..n_photons {
            let k = jc_index(i, n, n_photons);
            h[(k, k)] = C64::new(levels[i] + f_r * n as f64 - frame * (i + n) as f64, 0.0);
        }
    }
    for i in 0..nq - 1 {
        for n in 0..n_photons - 1 {
            let c = C64::new(((i + 1) as f64).sqrt() * g * ((n + 1) as f64).sqrt(), 0.0);
            let a = jc_index(i, n + 1, n_photons);
            let b = jc_index(i + 1, n, n_photons);
            h[(a, b)] = c;
            h[(b, a)] = c;
        }
    }
    h
}

/// Generalized Jaynes-Cummings Hamiltonian (MHz) in the basis |i⟩⊗|n⟩,
/// index `i·n_photons + n`.
pub fn jc_hamiltonian(params: &DeviceParams) -> Result<ComplexMatrix> {
    params.validate()?;
    let levels = params.level_frequencies()?;
    Ok(build_hamiltonian(&levels.omega, params.f_r, params.g, params.n_photons, 0.0))
}

/// Excitation number operator i + n on the truncated space.
pub fn excitation_number(n_levels: usize, n_photons: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..n_levels).flat_map(|i| (0..n_photons).map(move |n| (i + n) as f64)).collect();
    ComplexMatrix::real_diag(&diag)
}

/// Exact dressed-state cavity pulls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DressedPulls {
    /// pull_i = E(i,1) − E(i,0) − f_r for each level i with a resolvable
    /// one-photon partner.
    pub pulls: Vec<f64>,
    pub chi01: f64,
    /// Absent for a two-level truncation.
    pub chi12: Option<f64>,
}

/// Dressed eigenvalue attached to bare state `target` by maximum overlap.
fn labeled_energy(eig: &crate::qcore::HermitianEigen, target: usize, n_photons: usize) -> Result<f64> {
    let n = eig.values.len();
    let mut best = (0usize, -1.0f64);
    for k in 0..n {
        let w = eig.vectors[(target, k)].norm_sqr();
        if w > best.1 {
            best = (k, w);
        }
    }
    if best.1 < 0.5 + 1e-9 {
        // Name the bare state that dominates the competing dressed state.
        let k = best.0;
        let competitor = (0..n)
            .filter(|&b| b != target)
            .max_by(|&a, &b| eig.vectors[(a, k)].norm_sqr().total_cmp(&eig.vectors[(b, k)].norm_sqr()))
            .unwrap_or(target);
        let name = |k: usize| format!("|{},{}⟩", k / n_photons, k % n_photons);
        return Err(Error::AmbiguousLabel { target: name(target), competitor: name(competitor), overlap: best.1 });
    }
    Ok(eig.values[best.0])
}

/// Exact cavity pulls from diagonalizing the JC Hamiltonian.
///
/// The Hamiltonian commutes with the excitation number, so it is diagonalized
/// in the frame rotating at f_r (H − f_r·N), which leaves eigenvectors
/// unchanged and keeps eigenvalues of order δ.
pub fn dressed_cavity_pull(params: &DeviceParams) -> Result<DressedPulls> {
    params.validate()?;
    let levels = params.level_frequencies()?;
    let np = params.n_photons;
    let h = build_hamiltonian(&levels.omega, params.f_r, params.g, np, params.f_r);
    let eig = eig_hermitian(&h)?;
    let n_pulls = levels.n_levels().min(3);
    let pulls = (0..n_pulls)
        .map(|i| {
            let e0 = labeled_energy(&eig, jc_index(i, 0, np), np)?;
            let e1 = labeled_energy(&eig, jc_index(i, 1, np), np)?;
            Ok(e1 - e0)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DressedPulls {
        chi01: 0.5 * (pulls[1] - pulls[0]),
        chi12: (pulls.len() > 2).then(|| 0.5 * (pulls[2] - pulls[1])),
        pulls,
    })
}

/// Exact χ12 at detuning δ.
pub fn exact_chi12(params: &DeviceParams, delta: f64) -> Result<f64> {
    dressed_cavity_pull(&params.with_delta(delta)?)?
        .chi12
        .ok_or_else(|| Error::InvalidParameter("χ12 needs at least three levels".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweetSpotMode {
    Exact,
    SecondOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweetSpot {
    pub delta: f64,
    pub f01: f64,
}

/// Root of χ12(δ) inside `bracket`.
pub fn find_sweet_spot(params: &DeviceParams, bracket: (f64, f64), mode: SweetSpotMode) -> Result<SweetSpot> {
    params.validate()?;
    let (lo, hi) = bracket;
    let delta = match mode {
        SweetSpotMode::Exact => brent("exact χ12", |d| exact_chi12(params, d), lo, hi, 1e-10)?,
        SweetSpotMode::SecondOrder => {
            let alpha = params.alpha()?;
            let chi = |d: f64| dispersive_shifts_2nd_order(params.g, d, alpha).map(|s| s.chi12);
            let (a, b) = (chi(lo)?, chi(hi)?);
            if a.signum() == b.signum() && a != 0.0 && b != 0.0 {
                return Err(Error::NoSignChange { quantity: "second-order χ12".into(), lo, hi });
            }
            alpha
        }
    };
    Ok(SweetSpot { delta, f01: params.f_r + delta })
}

/// Pulls when the cavity holds `n` photons, E(i,n+1) − E(i,n) − f_r, for
/// each of the lowest three levels. Shows the photon-number dependence of
/// the sweet spot that second-order theory misses.
pub fn manifold_pulls(params: &DeviceParams, n: usize) -> Result<Vec<f64>> {
    params.validate()?;
    if n + 1 >= params.n_photons {
        return Err(Error::InvalidParameter(format!(
            "manifold {n} needs more than {} photon states",
            params.n_photons
        )));
    }
    let levels = params.level_frequencies()?;
    let np = params.n_photons;
    let h = build_hamiltonian(&levels.omega, params.f_r, params.g, np, params.f_r);
    let eig = eig_hermitian(&h)?;
    (0..levels.n_levels().min(3))
        .map(|i| Ok(labeled_energy(&eig, jc_index(i, n + 1, np), np)? - labeled_energy(&eig, jc_index(i, n, np), np)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_like(delta: f64) -> DeviceParams {
        DeviceParams::duffing(7182.0, 20.0, 7182.0 + delta, -310.0, 1.71)
    }

    #[test]
    fn uncoupled_hamiltonian_is_diagonal() {
        let mut p = paper_like(-300.0);
        p.g = 1e-300;
        let h = jc_hamiltonian(&p).unwrap();
        let levels = p.level_frequencies().unwrap();
        for i in 0..6 {
            for n in 0..6 {
                let k = jc_index(i, n, 6);
                assert!((h[(k, k)].re - (levels.omega[i] + 7182.0 * n as f64)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn two_by_two_block_is_textbook() {
        let mut p = DeviceParams::duffing(5000.0, 30.0, 4800.0, -200.0, 1.0);
        p.n_qutrit_levels = 2;
        p.n_photons = 2;
        let h = jc_hamiltonian(&p).unwrap();
        assert_eq!(h[(jc_index(0, 1, 2), jc_index(1, 0, 2))], C64::new(30.0, 0.0));
        assert_eq!(h[(jc_index(1, 1, 2), jc_index(1, 1, 2))], C64::new(9800.0, 0.0));
    }

    #[test]
    fn commutes_with_excitation_number_away_from_the_edge() {
        let p = paper_like(-300.0);
        let h = jc_hamiltonian(&p).unwrap();
        let n = excitation_number(6, 6);
        let comm = &(&h * &n) - &(&n * &h);
        // Couplings only connect states of equal excitation number, so the
        // commutator vanishes on the whole truncated space.
        assert!(comm.max_abs() < 1e-10);
    }

    #[test]
    fn weak_coupling_pulls_vanish() {
        let mut p = paper_like(-300.0);
        p.g = 1e-4;
        let pulls = dressed_cavity_pull(&p).unwrap();
        assert!(pulls.pulls.iter().all(|x| x.abs() < 1e-6));
    }

    #[test]
    fn two_level_truncation_matches_textbook_shift() {
        let mut p = DeviceParams::duffing(7182.0, 20.0, 7182.0 - 400.0, -310.0, 1.0);
        p.n_qutrit_levels = 2;
        let pulls = dressed_cavity_pull(&p).unwrap();
        let textbook = 20.0 * 20.0 / -400.0;
        assert!(pulls.chi12.is_none());
        assert!((pulls.pulls[0] + textbook).abs() <= 0.05 * textbook.abs());
        assert!((pulls.chi01 - textbook).abs() <= 0.05 * textbook.abs());
    }

    #[test]
    fn exact_agrees_with_perturbation_at_small_coupling() {
        let delta = -400.0;
        let mut p = paper_like(delta);
        p.g = 0.05 * delta.abs();
        let exact = dressed_cavity_pull(&p).unwrap();
        let pert = dispersive_shifts_2nd_order(p.g, delta, -310.0).unwrap();
        assert!((exact.chi01 - pert.chi01).abs() <= 0.1 * pert.chi01.abs());
    }

    #[test]
    fn second_order_sweet_spot_is_alpha() {
        let p = paper_like(-300.0);
        let s = find_sweet_spot(&p, (-400.0, -250.0), SweetSpotMode::SecondOrder).unwrap();
        assert_eq!(s.delta, -310.0);
    }

    #[test]
    fn exact_sweet_spot_is_near_alpha() {
        let p = paper_like(-300.0);
        let s = find_sweet_spot(&p, (-400.0, -250.0), SweetSpotMode::Exact).unwrap();
        assert!((s.delta + 310.0).abs() < 50.0, "δ* = {}", s.delta);
        assert!(exact_chi12(&p, s.delta).unwrap().abs() < 1e-6);
    }

    #[test]
    fn bracket_without_crossing_errors() {
        let p = paper_like(-300.0);
        let e = find_sweet_spot(&p, (-250.0, -200.0), SweetSpotMode::Exact);
        assert!(matches!(e, Err(Error::NoSignChange { .. })));
        let e = find_sweet_spot(&p, (-250.0, -200.0), SweetSpotMode::SecondOrder);
        assert!(matches!(e, Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn resonant_coupling_is_ambiguous() {
        let mut p = paper_like(0.0);
        p.g = 20.0;
        assert!(matches!(dressed_cavity_pull(&p), Err(Error::AmbiguousLabel { .. })));
    }

    #[test]
    fn transmon_levels_can_be_swept() {
        let spec = TransmonSpec::new(23000.0, 281.0).unwrap();
        let p = DeviceParams {
            f_r: 7182.0,
            g: 20.0,
            levels: LevelModel::Transmon(spec),
            kappa: 1.71,
            n_qutrit_levels: 6,
            n_photons: 6,
        };
        let q = p.with_delta(-280.0).unwrap();
        assert!((q.delta().unwrap() + 280.0).abs() < 1e-9);
        assert!((q.alpha().unwrap() - p.alpha().unwrap()).abs() < 1e-9);
    }
}
