//! Sequential measurements and the compatibility bound
//! `|⟨A_u|A_u A_v⟩ − ⟨A_u|A_v A_u⟩| ≤ ε_uv`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::procedure::{BinaryObservable, MeasurementProcedure};
use crate::control::{projection_procedure, table1_preparation_states};
use crate::error::{Error, Result};
use crate::qcore::matrix::inner;
use crate::qcore::random::haar_state;
use crate::qcore::{eig_hermitian, ComplexMatrix, DensityMatrix, UnitaryMatrix};
use crate::tomography::ProcessMatrix;

/// Which record of a two-measurement sequence is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Record {
    First,
    Second,
}

/// Exact expectation of the chosen record when `first` is measured and
/// then `second`, by enumerating all outcome branches.
pub fn sequential_expectation(
    first: &MeasurementProcedure,
    second: &MeasurementProcedure,
    rho: &DensityMatrix,
    which: Record,
) -> Result<f64> {
    check_dims(first, second, rho)?;
    let mut total = 0.0;
    for (a, sigma) in first.branches(rho.matrix()) {
        for (b, tau) in second.branches(&sigma) {
            let p = tau.trace().re;
            total += p * match which {
                Record::First => a,
                Record::Second => b,
            };
        }
    }
    Ok(total)
}

/// Sampled estimate of the same quantity: mean and standard error over
/// `shots` simulated runs.
pub fn sampled_sequential_expectation<R: Rng + ?Sized>(
    first: &MeasurementProcedure,
    second: &MeasurementProcedure,
    rho: &DensityMatrix,
    which: Record,
    shots: u64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    check_dims(first, second, rho)?;
    if shots < 2 {
        return Err(Error::InvalidParameter("need at least two shots".into()));
    }
    // Joint outcome distribution, then shots drawn from it.
    let mut joint = Vec::new();
    for (a, sigma) in first.branches(rho.matrix()) {
        for (b, tau) in second.branches(&sigma) {
            let value = if which == Record::First { a } else { b };
            joint.push((tau.trace().re.max(0.0), value));
        }
    }
    let norm: f64 = joint.iter().map(|(p, _)| p).sum();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..shots {
        let mut r = rng.random::<f64>() * norm;
        let mut value = joint.last().map_or(0.0, |j| j.1);
        for &(p, v) in &joint {
            if r < p {
                value = v;
                break;
            }
            r -= p;
        }
        sum += value;
        sum_sq += value * value;
    }
    let n = shots as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

fn check_dims(first: &MeasurementProcedure, second: &MeasurementProcedure, rho: &DensityMatrix) -> Result<()> {
    if first.dim() != second.dim() || first.dim() != rho.dim() {
        return Err(Error::DimensionMismatch("procedures and state differ in dimension".into()));
    }
    Ok(())
}

/// Result of an ε evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpsilonEstimate {
    pub epsilon: f64,
    /// Index into the state set of the maximizing state.
    pub witness: usize,
    /// `|⟨u|v⟩|`; the bound is only meaningful for orthogonal rays.
    pub ray_overlap: f64,
}

impl EpsilonEstimate {
    pub fn rays_orthogonal(&self) -> bool {
        self.ray_overlap < 1e-9
    }
}

/// Nine preparation states of the standard pulse table followed by
/// `n_haar` Haar-random pure states drawn from `seed`.
pub fn default_state_set(n_haar: usize, seed: u64) -> Vec<DensityMatrix> {
    let mut states = table1_preparation_states();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n_haar {
        states.push(DensityMatrix::pure(&haar_state(3, &mut rng)).expect("Haar states are normalized"));
    }
    states
}

/// `max_ρ |⟨A_u|A_u A_v⟩ − ⟨A_u|A_v A_u⟩|` over `states`.
pub fn epsilon_uv(
    u: &MeasurementProcedure,
    v: &MeasurementProcedure,
    states: &[DensityMatrix],
) -> Result<EpsilonEstimate> {
    if states.is_empty() {
        return Err(Error::InvalidParameter("empty state set".into()));
    }
    let mut best = (0.0f64, 0usize);
    for (k, rho) in states.iter().enumerate() {
        let uv = sequential_expectation(u, v, rho, Record::First)?;
        let vu = sequential_expectation(v, u, rho, Record::Second)?;
        let diff = (uv - vu).abs();
        if diff > best.0 {
            best = (diff, k);
        }
    }
    Ok(EpsilonEstimate { epsilon: best.0, witness: best.1, ray_overlap: overlap(u, v) })
}

fn overlap(u: &MeasurementProcedure, v: &MeasurementProcedure) -> f64 {
    inner(u.target().ray(), v.target().ray()).norm()
}

/// Observable `D` with `⟨A_u|A_u A_v⟩ − ⟨A_u|A_v A_u⟩ = Tr(D ρ)`:
/// `D = O_u − E_v†(O_u)` where `O_u` is the recorded observable of `u` and
/// `E_v` the outcome-averaged channel of `v`.
pub fn difference_observable(u: &MeasurementProcedure, v: &MeasurementProcedure) -> Result<ComplexMatrix> {
    let o_u = u.recorded_observable();
    let e_v = v.channel()?;
    Ok((&o_u - &e_v.adjoint_apply(&o_u)).hermitian_part())
}

/// ε maximized over all states: the spectral norm of the difference
/// observable.
pub fn epsilon_exact(u: &MeasurementProcedure, v: &MeasurementProcedure) -> Result<f64> {
    spectral_norm(&difference_observable(u, v)?)
}

fn spectral_norm(h: &ComplexMatrix) -> Result<f64> {
    let eig = eig_hermitian(h)?;
    Ok(eig.values.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// ε for a measured process `χ` used as the device channel of both
/// procedures, with ideal rotations and ideal readout contrast: the record
/// of `A_u` is `Tr(A_u ρ)` on the state entering the measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProcessEpsilon {
    pub ensemble: EpsilonEstimate,
    pub exact: f64,
}

pub fn epsilon_from_process(
    chi: &ProcessMatrix,
    u: &[C64],
    v: &[C64],
    states: &[DensityMatrix],
) -> Result<ProcessEpsilon> {
    let deviation = chi.tp_deviation();
    if deviation > crate::tomography::process::PROCESS_TP_TOL {
        return Err(Error::NotTracePreserving { deviation });
    }
    if states.is_empty() {
        return Err(Error::InvalidParameter("empty state set".into()));
    }
    let device = chi.to_channel()?;
    let au = BinaryObservable::new(u)?;
    let av = BinaryObservable::new(v)?;
    let pv = projection_procedure(av.ray())?;
    let e_v = device.conjugated(&pv.pre, &pv.post)?;
    let o_u = au.observable().matrix();
    let d = (o_u - &e_v.adjoint_apply(o_u)).hermitian_part();

    let mut best = (0.0f64, 0usize);
    for (k, rho) in states.iter().enumerate() {
        let value = d.hs_inner(rho.matrix()).re.abs();
        if value > best.0 {
            best = (value, k);
        }
    }
    Ok(ProcessEpsilon {
        ensemble: EpsilonEstimate { epsilon: best.0, witness: best.1, ray_overlap: inner(au.ray(), av.ray()).norm() },
        exact: spectral_norm(&d)?,
    })
}

/// Conjugates every Kraus operator and both rotations of a procedure by a
/// fixed frame change `W`: the procedure then measures `W|v⟩`.
pub fn change_frame(p: &MeasurementProcedure, w: &UnitaryMatrix) -> Result<MeasurementProcedure> {
    let target = BinaryObservable::new(&w.apply(p.target().ray()))?;
    let w_inv = w.adjoint();
    let pre = UnitaryMatrix::new(p.pre().matrix() * w_inv.matrix())?;
    let post = UnitaryMatrix::new(w.matrix() * p.post().matrix())?;
    MeasurementProcedure::new(target, pre, p.device().clone(), post)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::basis_ket;
    use crate::qcore::random::random_unitary;

    fn psi1() -> Vec<C64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![C64::new(0.0, 0.0), C64::new(h, 0.0), C64::new(h, 0.0)]
    }

    #[test]
    fn ternary_realization_disturbs_psi1() {
        let a_psi = MeasurementProcedure::ternary(&psi1()).unwrap();
        let a_0 = MeasurementProcedure::ternary(&basis_ket(3, 0)).unwrap();
        let rho = DensityMatrix::pure(&psi1()).unwrap();
        let first = sequential_expectation(&a_psi, &a_0, &rho, Record::First).unwrap();
        let second = sequential_expectation(&a_0, &a_psi, &rho, Record::Second).unwrap();
        assert!((first - 1.0).abs() < 1e-12);
        assert!(second.abs() < 1e-12);
        let eps = epsilon_uv(&a_psi, &a_0, &[rho]).unwrap();
        assert!(eps.epsilon >= 1.0 - 1e-12);
        assert!(eps.rays_orthogonal());
    }

    #[test]
    fn ideal_degenerate_procedures_are_compatible() {
        let u = MeasurementProcedure::ideal_binary(&basis_ket(3, 0)).unwrap();
        let v = MeasurementProcedure::ideal_binary(&psi1()).unwrap();
        let states = default_state_set(200, 1);
        assert!(epsilon_uv(&u, &v, &states).unwrap().epsilon < 1e-12);
        assert!(epsilon_uv(&v, &u, &states).unwrap().epsilon < 1e-12);
        assert!(epsilon_exact(&u, &v).unwrap() < 1e-12);
        for rho in &states[..20] {
            let a = sequential_expectation(&u, &v, rho, Record::Second).unwrap();
            let b = sequential_expectation(&v, &u, rho, Record::First).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_measurement_agrees_with_itself() {
        let p = MeasurementProcedure::ternary(&psi1()).unwrap();
        assert!(epsilon_exact(&p, &p).unwrap() < 1e-12);
        let states = default_state_set(50, 2);
        assert!(epsilon_uv(&p, &p, &states).unwrap().epsilon < 1e-12);
    }

    #[test]
    fn exact_mode_bounds_the_ensemble_and_matches_branch_enumeration() {
        let u = MeasurementProcedure::ternary(&psi1()).unwrap();
        let v = MeasurementProcedure::ternary(&basis_ket(3, 0)).unwrap();
        let d = difference_observable(&u, &v).unwrap();
        let states = default_state_set(100, 3);
        for rho in &states {
            let direct = sequential_expectation(&u, &v, rho, Record::First).unwrap()
                - sequential_expectation(&v, &u, rho, Record::Second).unwrap();
            assert!((direct - d.hs_inner(rho.matrix()).re).abs() < 1e-12);
        }
        let ensemble = epsilon_uv(&u, &v, &states).unwrap().epsilon;
        let exact = epsilon_exact(&u, &v).unwrap();
        assert!(ensemble <= exact + 1e-12);
        assert!((exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn epsilon_is_frame_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = UnitaryMatrix::new(random_unitary(3, &mut rng)).unwrap();
        let u = MeasurementProcedure::ternary(&psi1()).unwrap();
        let v = MeasurementProcedure::ternary(&basis_ket(3, 0)).unwrap();
        let states = default_state_set(30, 5);
        let moved: Vec<DensityMatrix> = states.iter().map(|s| s.evolve(&w).unwrap()).collect();
        let a = epsilon_uv(&u, &v, &states).unwrap().epsilon;
        let b = epsilon_uv(&change_frame(&u, &w).unwrap(), &change_frame(&v, &w).unwrap(), &moved).unwrap().epsilon;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sampling_agrees_with_enumeration() {
        let u = MeasurementProcedure::ternary(&psi1()).unwrap();
        let v = MeasurementProcedure::ternary(&basis_ket(3, 0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = DensityMatrix::pure(&haar_state(3, &mut rng)).unwrap();
        let exact = sequential_expectation(&v, &u, &rho, Record::Second).unwrap();
        let (mean, se) = sampled_sequential_expectation(&v, &u, &rho, Record::Second, 100_000, &mut rng).unwrap();
        assert!((mean - exact).abs() < 3.0 * se + 1e-12, "{mean} vs {exact} ± {se}");
    }

    #[test]
    fn process_route_reproduces_ideal_limits() {
        use crate::readout::{ideal_binary_channel, ideal_ternary_channel};
        use crate::tomography::{ideal_process_matrix, OperatorBasis};
        let basis = OperatorBasis::gell_mann(3);
        let states = default_state_set(100, 7);
        let binary = ideal_process_matrix(&ideal_binary_channel(), &basis).unwrap();
        let r = epsilon_from_process(&binary, &basis_ket(3, 0), &psi1(), &states).unwrap();
        assert!(r.ensemble.epsilon < 1e-12 && r.exact < 1e-12);
        let ternary = ideal_process_matrix(&ideal_ternary_channel(), &basis).unwrap();
        let r = epsilon_from_process(&ternary, &psi1(), &basis_ket(3, 0), &states).unwrap();
        assert!((r.exact - 1.0).abs() < 1e-12);
        let witness = DensityMatrix::pure(&psi1()).unwrap();
        let r = epsilon_from_process(&ternary, &psi1(), &basis_ket(3, 0), &[witness]).unwrap();
        assert!((r.ensemble.epsilon - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_sets_and_non_tp_processes_are_rejected() {
        use crate::tomography::{OperatorBasis, ProcessMatrix};
        let u = MeasurementProcedure::ternary(&psi1()).unwrap();
        assert!(epsilon_uv(&u, &u, &[]).is_err());
        let basis = OperatorBasis::gell_mann(3);
        let half = ProcessMatrix::new(ComplexMatrix::identity(9).scale_real(0.1), basis).unwrap();
        assert!(epsilon_from_process(&half, &psi1(), &basis_ket(3, 0), &default_state_set(1, 0)).is_err());
    }
}
