//! Process matrices and process tomography.

use serde::{Deserialize, Serialize};

use super::basis::OperatorBasis;
use super::design::TomographyDesign;
use super::mle::{likelihood_for, Likelihood, MleOptions, MleReport, Problem, Shots};
use crate::error::{Error, Result};
use crate::qcore::linalg::{eig_hermitian, svd_real};
use crate::qcore::state::psd_fidelity;
use crate::qcore::{ComplexMatrix, DensityMatrix, KrausChannel};

/// Tolerance on `Σ χ_mn B_n† B_m = I`.
pub const PROCESS_TP_TOL: f64 = 1e-6;

/// `E(ρ) = Σ_mn χ_mn B_m ρ B_n†` in a fixed orthonormal operator basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessMatrix {
    chi: ComplexMatrix,
    basis: OperatorBasis,
}

impl ProcessMatrix {
    pub fn new(chi: ComplexMatrix, basis: OperatorBasis) -> Result<Self> {
        if chi.rows() != basis.len() || !chi.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "χ is {}x{} for a basis of {} elements",
                chi.rows(),
                chi.cols(),
                basis.len()
            )));
        }
        let deviation = chi.hermitian_deviation();
        if deviation > 1e-9 {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { chi: chi.hermitian_part(), basis })
    }

    /// From a Choi matrix `J = Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)`.
    pub fn from_choi(choi: &ComplexMatrix, basis: OperatorBasis) -> Result<Self> {
        let w = basis.vectorization_matrix();
        if choi.rows() != w.rows() {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix of size {} for basis dimension {}",
                choi.rows(),
                basis.dim()
            )));
        }
        let chi = &(&w.adjoint() * choi) * &w;
        Self::new(chi, basis)
    }

    pub fn chi(&self) -> &ComplexMatrix {
        &self.chi
    }

    pub fn basis(&self) -> &OperatorBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn choi(&self) -> ComplexMatrix {
        let w = self.basis.vectorization_matrix();
        (&(&w * &self.chi) * &w.adjoint()).hermitian_part()
    }

    /// `max |Σ_mn χ_mn B_n† B_m − I|`
    pub fn tp_deviation(&self) -> f64 {
        let d = self.dim();
        let b = self.basis.elements();
        let mut sum = ComplexMatrix::zeros(d, d);
        for m in 0..b.len() {
            for n in 0..b.len() {
                let c = self.chi[(m, n)];
                if c.norm() > 0.0 {
                    sum += &(&b[n].adjoint() * &b[m]).scale(c);
                }
            }
        }
        sum.max_abs_diff(&ComplexMatrix::identity(d))
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eig_hermitian(&self.chi)?.values[0])
    }

    /// Kraus form from the eigen-decomposition of the Choi matrix.
    pub fn to_channel(&self) -> Result<KrausChannel> {
        KrausChannel::from_choi(&self.choi())
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let b = self.basis.elements();
        let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
        for m in 0..b.len() {
            let left = &b[m] * rho;
            for n in 0..b.len() {
                let c = self.chi[(m, n)];
                if c.norm() > 0.0 {
                    out += &(&left * &b[n].adjoint()).scale(c);
                }
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ProcessMatrix {
    type Output = num_complex::Complex64;

    fn index(&self, idx: (usize, usize)) -> &Self::Output {
        &self.chi[idx]
    }
}

/// `χ_mn = Σ_k c_km c_kn*` with `K_k = Σ_m c_km B_m`.
pub fn ideal_process_matrix(channel: &KrausChannel, basis: &OperatorBasis) -> Result<ProcessMatrix> {
    if channel.dim() != basis.dim() {
        return Err(Error::DimensionMismatch(format!("channel on {} levels, basis on {}", channel.dim(), basis.dim())));
    }
    let n = basis.len();
    let mut chi = ComplexMatrix::zeros(n, n);
    for k in channel.ops() {
        let c = basis.coordinates(k);
        chi += &ComplexMatrix::outer(&c, &c);
    }
    ProcessMatrix::new(chi, basis.clone())
}

/// `(1/d²)[Tr √(√χ_a χ_b √χ_a)]²`, which is `1/9 [...]²` for a qutrit.
pub fn process_fidelity(a: &ProcessMatrix, b: &ProcessMatrix) -> Result<f64> {
    if !a.basis.approx_eq(&b.basis, 1e-12) {
        return Err(Error::InvalidParameter("process matrices are expressed in different bases".into()));
    }
    let d2 = (a.dim() * a.dim()) as f64;
    Ok(psd_fidelity(&a.chi, &b.chi)? / d2)
}

/// Data for process tomography.
#[derive(Debug, Clone)]
pub enum ProcessData<'a> {
    /// One reconstructed output state per preparation.
    Outputs(&'a [DensityMatrix]),
    /// Raw records of a state-tomography design after each preparation.
    Raw { design: &'a TomographyDesign, shots: &'a [Shots] },
}

/// Maximum-likelihood process matrix over completely positive,
/// trace-preserving maps. The constraint set is reached by Dykstra's
/// alternating projection between the PSD cone and the TP affine subspace
/// of Choi matrices.
pub fn mle_process(preps: &[DensityMatrix], data: ProcessData<'_>, basis: &OperatorBasis) -> Result<ProcessMatrix> {
    Ok(mle_process_with(preps, data, basis, &MleOptions::default())?.0)
}

pub fn mle_process_with(
    preps: &[DensityMatrix],
    data: ProcessData<'_>,
    basis: &OperatorBasis,
    options: &MleOptions,
) -> Result<(ProcessMatrix, MleReport)> {
    let d = basis.dim();
    let needed = d * d;
    if let Some(p) = preps.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch(format!("preparation of dimension {} for a {d}-level basis", p.dim())));
    }
    let rows: Vec<Vec<f64>> = preps.iter().map(|p| basis.real_coordinates(p.matrix())).collect();
    let rank = if rows.is_empty() { 0 } else { svd_real(&rows).rank(1e-8) };
    if rank < needed {
        return Err(Error::RankDeficientPreparations { rank, needed });
    }

    // Prediction for effect O after preparation ρ: Tr((ρᵀ ⊗ O) J).
    let mut functionals = Vec::new();
    let mut values = Vec::new();
    let mut weights = Vec::new();
    let likelihood;
    match data {
        ProcessData::Outputs(outputs) => {
            if outputs.len() != preps.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} outputs for {} preparations",
                    outputs.len(),
                    preps.len()
                )));
            }
            for (rho, sigma) in preps.iter().zip(outputs) {
                let rt = rho.matrix().transpose();
                for b in basis.elements() {
                    functionals.push(rt.kron(b));
                    values.push(b.hs_inner(sigma.matrix()).re);
                    weights.push(1.0);
                }
            }
            likelihood = Likelihood::Gaussian;
        }
        ProcessData::Raw { design, shots } => {
            if shots.len() != preps.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} data sets for {} preparations",
                    shots.len(),
                    preps.len()
                )));
            }
            let kinds: Vec<Likelihood> = shots.iter().map(likelihood_for).collect();
            likelihood = kinds[0];
            if kinds.iter().any(|&k| k != likelihood) {
                return Err(Error::InvalidParameter("mixed data kinds across preparations".into()));
            }
            for (rho, s) in preps.iter().zip(shots) {
                if s.len() != design.n_rows() {
                    return Err(Error::DimensionMismatch(format!("{} records for {} rows", s.len(), design.n_rows())));
                }
                let rt = rho.matrix().transpose();
                for e in design.effects() {
                    functionals.push(rt.kron(e));
                }
                match s {
                    Shots::Exact { values: v } => {
                        values.extend(v);
                        weights.extend(std::iter::repeat_n(1.0, v.len()));
                    }
                    Shots::Averaged { means, counts, single_shot_sigma } => {
                        values.extend(means);
                        weights.extend(counts.iter().map(|&c| c as f64 / single_shot_sigma.powi(2)));
                    }
                    Shots::Counts { counts } => {
                        values.extend(counts.iter().map(|&c| c as f64));
                        weights.extend(std::iter::repeat_n(1.0, counts.len()));
                    }
                }
            }
            let mean = weights.iter().sum::<f64>() / weights.len() as f64;
            if mean > 0.0 {
                weights.iter_mut().for_each(|w| *w /= mean);
            }
        }
    }

    let problem = Problem { functionals: &functionals, data: values, weights, likelihood };
    let start = ComplexMatrix::identity(d * d).scale_real(1.0 / d as f64);
    let project = |j: &ComplexMatrix| project_cptp(j, d);
    let (choi, report) = problem.solve(start, &project, options)?;
    if !report.converged && report.iterations >= options.max_iter {
        return Err(Error::NoConvergence(format!(
            "process MLE stopped after {} iterations (gradient mapping {:.3e}, residual {:.3e})",
            report.iterations, report.gradient_mapping_norm, report.residual
        )));
    }
    let chi = ProcessMatrix::from_choi(&choi, basis.clone())?;
    let deviation = chi.tp_deviation();
    if deviation > PROCESS_TP_TOL {
        return Err(Error::NotTracePreserving { deviation });
    }
    Ok((chi, report))
}

/// Orthogonal projection onto `{J : Tr_out J = I}` for the Choi layout
/// with the input index outermost.
pub fn project_trace_preserving(j: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let mut out = j.clone();
    for i in 0..d {
        for k in 0..d {
            let mut t = num_complex::Complex64::new(0.0, 0.0);
            for a in 0..d {
                t += j[(i * d + a, k * d + a)];
            }
            let target = if i == k { 1.0 } else { 0.0 };
            let correction = (t - target) / d as f64;
            for a in 0..d {
                out[(i * d + a, k * d + a)] -= correction;
            }
        }
    }
    out
}

fn project_psd_exact(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(&m.hermitian_part())?;
    Ok(eig.map(|x| x.max(0.0)).hermitian_part())
}

/// Euclidean projection onto CPTP Choi matrices by Dykstra's algorithm.
/// The result is exactly trace preserving; its most negative eigenvalue
/// is below `1e-11` in magnitude on return.
pub fn project_cptp(j: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    let n = j.rows();
    let mut x = project_trace_preserving(&j.hermitian_part(), d);
    let mut p = ComplexMatrix::zeros(n, n);
    let mut q = ComplexMatrix::zeros(n, n);
    for _ in 0..20_000 {
        let y = project_psd_exact(&(&x + &p))?;
        p = &(&x + &p) - &y;
        let next = project_trace_preserving(&(&y + &q), d);
        q = &(&y + &q) - &next;
        let gap = next.max_abs_diff(&y);
        x = next;
        if gap < 1e-12 {
            return Ok(x);
        }
    }
    let min = eig_hermitian(&x)?.values[0];
    if min < -1e-9 {
        return Err(Error::NoConvergence(format!("CPTP projection left eigenvalue {min:.3e}")));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{table1_preparation_states, table1_tomography_set};
    use crate::qcore::apply_channel;
    use crate::qcore::random::{random_density, random_kraus};
    use crate::readout::ideal_binary_channel;
    use crate::tomography::design::{build_design, Measurement};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gm() -> OperatorBasis {
        OperatorBasis::gell_mann(3)
    }

    #[test]
    fn identity_channel_is_a_single_entry() {
        let chi = ideal_process_matrix(&KrausChannel::identity(3), &gm()).unwrap();
        assert!((chi[(0, 0)].re - 3.0).abs() < 1e-12);
        let mut rest = chi.chi().clone();
        rest[(0, 0)] = num_complex::Complex64::new(0.0, 0.0);
        assert!(rest.max_abs() < 1e-12);
        assert!(chi.tp_deviation() < 1e-12);
    }

    #[test]
    fn fidelity_to_self_and_to_depolarizing() {
        let basis = gm();
        let id = ideal_process_matrix(&KrausChannel::identity(3), &basis).unwrap();
        assert!((process_fidelity(&id, &id).unwrap() - 1.0).abs() < 1e-12);
        let dep = ProcessMatrix::new(ComplexMatrix::identity(9).scale_real(1.0 / 3.0), basis).unwrap();
        assert!(dep.tp_deviation() < 1e-12);
        assert!((process_fidelity(&id, &dep).unwrap() - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn kraus_chi_kraus_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let basis = gm();
        let ch = KrausChannel::new(random_kraus(3, 3, &mut rng), None).unwrap();
        let chi = ideal_process_matrix(&ch, &basis).unwrap();
        assert!(chi.tp_deviation() < 1e-10);
        let back = chi.to_channel().unwrap();
        let again = ProcessMatrix::from_choi(&ch.choi(), basis).unwrap();
        assert!(again.chi().approx_eq(chi.chi(), 1e-10));
        for _ in 0..5 {
            let rho = DensityMatrix::new(random_density(3, &mut rng)).unwrap();
            let a = apply_channel(&ch, &rho).unwrap();
            let b = apply_channel(&back, &rho).unwrap();
            assert!(a.matrix().approx_eq(b.matrix(), 1e-10));
            assert!(chi.apply(rho.matrix()).approx_eq(a.matrix(), 1e-10));
        }
    }

    #[test]
    fn process_mle_from_outputs_recovers_binary_channel() {
        let basis = gm();
        let ch = ideal_binary_channel();
        let preps = table1_preparation_states();
        let outputs: Vec<DensityMatrix> = preps.iter().map(|p| apply_channel(&ch, p).unwrap()).collect();
        let est = mle_process(&preps, ProcessData::Outputs(&outputs), &basis).unwrap();
        let ideal = ideal_process_matrix(&ch, &basis).unwrap();
        assert!((est.chi() - ideal.chi()).frobenius_norm() < 1e-6);
        assert!(est.min_eigenvalue().unwrap() > -1e-9);
    }

    #[test]
    fn process_mle_from_raw_records() {
        let basis = gm();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ch = KrausChannel::new(random_kraus(3, 2, &mut rng), None).unwrap();
        let preps = table1_preparation_states();
        let design = build_design(&table1_tomography_set(), Measurement::degenerate_ground()).unwrap();
        let shots: Vec<Shots> = preps
            .iter()
            .map(|p| Shots::Exact { values: design.predict(apply_channel(&ch, p).unwrap().matrix()) })
            .collect();
        let est = mle_process(&preps, ProcessData::Raw { design: &design, shots: &shots }, &basis).unwrap();
        let ideal = ideal_process_matrix(&ch, &basis).unwrap();
        assert!((est.chi() - ideal.chi()).frobenius_norm() < 1e-5);
    }

    #[test]
    fn cptp_projection_is_idempotent_on_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let ch = KrausChannel::new(random_kraus(3, 4, &mut rng), None).unwrap();
        let j = ch.choi();
        assert!(project_cptp(&j, 3).unwrap().approx_eq(&j, 1e-10));
        let noisy = &j + &ComplexMatrix::identity(9).scale_real(-0.2);
        let p = project_cptp(&noisy, 3).unwrap();
        let chi = ProcessMatrix::from_choi(&p, gm()).unwrap();
        assert!(chi.tp_deviation() < 1e-12);
        assert!(chi.min_eigenvalue().unwrap() > -1e-9);
    }

    #[test]
    fn rejects_deficient_preparations() {
        let preps = vec![DensityMatrix::basis(3, 0); 9];
        let outs = preps.clone();
        let err = mle_process(&preps, ProcessData::Outputs(&outs), &gm()).unwrap_err();
        assert!(matches!(err, Error::RankDeficientPreparations { rank: 1, needed: 9 }));
    }

    #[test]
    fn process_matrix_json_round_trip() {
        let chi = ideal_process_matrix(&ideal_binary_channel(), &gm()).unwrap();
        let json = serde_json::to_string(&chi).unwrap();
        let back: ProcessMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, chi);
    }
}
