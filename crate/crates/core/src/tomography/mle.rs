//! Constrained maximum-likelihood reconstruction by projected gradient
//! descent on the negative log-likelihood.

use serde::{Deserialize, Serialize};

use super::design::TomographyDesign;
use crate::error::{Error, Result};
use crate::qcore::linalg::{eig_hermitian, project_simplex, svd_real};
use crate::qcore::{ComplexMatrix, DensityMatrix};

/// Tomography data, one entry per design row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shots {
    /// Exact expectation values (noiseless mode).
    Exact { values: Vec<f64> },
    /// Averaged records with the number of shots behind each mean and the
    /// single-shot standard deviation.
    Averaged { means: Vec<f64>, counts: Vec<u64>, single_shot_sigma: f64 },
    /// Outcome counts for a POVM design.
    Counts { counts: Vec<u64> },
}

impl Shots {
    pub fn len(&self) -> usize {
        match self {
            Shots::Exact { values } => values.len(),
            Shots::Averaged { means, .. } => means.len(),
            Shots::Counts { counts } => counts.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self, rows: usize) -> Result<()> {
        if self.len() != rows {
            return Err(Error::DimensionMismatch(format!("{} records for {rows} design rows", self.len())));
        }
        if let Shots::Averaged { counts, single_shot_sigma, .. } = self {
            if counts.len() != rows {
                return Err(Error::DimensionMismatch("counts and means differ in length".into()));
            }
            if !(*single_shot_sigma > 0.0) {
                return Err(Error::InvalidParameter("single-shot sigma must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Likelihood {
    Gaussian,
    Multinomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleOptions {
    pub max_iter: usize,
    /// Convergence threshold on the gradient-mapping norm.
    pub tol: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self { max_iter: 10_000, tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleReport {
    pub iterations: usize,
    pub converged: bool,
    pub gradient_mapping_norm: f64,
    /// Negative log-likelihood up to a constant.
    pub objective: f64,
    /// Root-mean-square difference between data and prediction.
    pub residual: f64,
    pub likelihood: Likelihood,
}

/// A convex least-squares or multinomial problem over Hermitian matrices
/// whose predictions are `Tr(F_k X)`.
pub(crate) struct Problem<'a> {
    pub functionals: &'a [ComplexMatrix],
    pub data: Vec<f64>,
    pub weights: Vec<f64>,
    pub likelihood: Likelihood,
}

impl Problem<'_> {
    fn predict(&self, x: &ComplexMatrix) -> Vec<f64> {
        self.functionals.iter().map(|f| f.hs_inner(x).re).collect()
    }

    fn objective(&self, x: &ComplexMatrix) -> f64 {
        let p = self.predict(x);
        match self.likelihood {
            Likelihood::Gaussian => {
                p.iter().zip(&self.data).zip(&self.weights).map(|((p, y), w)| w * (p - y) * (p - y)).sum()
            }
            Likelihood::Multinomial => {
                let mut total = 0.0;
                for (p, n) in p.iter().zip(&self.data) {
                    if *n > 0.0 {
                        if *p <= 0.0 {
                            return f64::INFINITY;
                        }
                        total -= n * p.ln();
                    }
                }
                total
            }
        }
    }

    fn gradient(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let p = self.predict(x);
        let n = x.rows();
        let mut g = ComplexMatrix::zeros(n, n);
        for (k, f) in self.functionals.iter().enumerate() {
            let coef = match self.likelihood {
                Likelihood::Gaussian => 2.0 * self.weights[k] * (p[k] - self.data[k]),
                Likelihood::Multinomial if self.data[k] > 0.0 => -self.data[k] / p[k].max(1e-300),
                Likelihood::Multinomial => 0.0,
            };
            if coef != 0.0 {
                g += &f.scale_real(coef);
            }
        }
        g
    }

    /// Largest eigenvalue of the Gauss-Newton operator `X ↦ 2Σ w_k Tr(F_k X) F_k`
    /// by power iteration.
    fn lipschitz(&self, n: usize) -> f64 {
        let mut x = ComplexMatrix::identity(n).scale_real(1.0 / (n as f64).sqrt());
        let mut lambda = 0.0;
        for _ in 0..60 {
            let mut y = ComplexMatrix::zeros(n, n);
            for (f, w) in self.functionals.iter().zip(&self.weights) {
                y += &f.scale_real(2.0 * w * f.hs_inner(&x).re);
            }
            let norm = y.frobenius_norm();
            if norm == 0.0 {
                return 1.0;
            }
            lambda = norm;
            x = y.scale_real(1.0 / norm);
        }
        lambda
    }

    fn residual(&self, x: &ComplexMatrix) -> f64 {
        let p = self.predict(x);
        let total: f64 = match self.likelihood {
            Likelihood::Gaussian => p.iter().zip(&self.data).map(|(p, y)| (p - y).powi(2)).sum(),
            Likelihood::Multinomial => {
                let shots: f64 = self.data.iter().sum::<f64>().max(1.0);
                p.iter().zip(&self.data).map(|(p, n)| (p - n / shots).powi(2)).sum()
            }
        };
        (total / p.len().max(1) as f64).sqrt()
    }

    /// Projected gradient descent with backtracking. Every accepted step
    /// lowers the objective.
    pub fn solve(
        &self,
        start: ComplexMatrix,
        project: &dyn Fn(&ComplexMatrix) -> Result<ComplexMatrix>,
        options: &MleOptions,
    ) -> Result<(ComplexMatrix, MleReport)> {
        let n = start.rows();
        let mut x = project(&start)?;
        let mut fx = self.objective(&x);
        if !fx.is_finite() {
            return Err(Error::NoConvergence("starting point has zero likelihood".into()));
        }
        let mut step = match self.likelihood {
            Likelihood::Gaussian => 1.0 / self.lipschitz(n),
            Likelihood::Multinomial => 1.0 / self.data.iter().sum::<f64>().max(1.0),
        };
        let mut gm_norm = f64::INFINITY;
        let mut iterations = 0;
        while iterations < options.max_iter {
            iterations += 1;
            let g = self.gradient(&x);
            let mut accepted = None;
            for _ in 0..60 {
                let candidate = project(&(&x - &g.scale_real(step)))?;
                let diff = &candidate - &x;
                let fc = self.objective(&candidate);
                // Sufficient decrease for the projected step.
                let bound = fx + g.hs_inner(&diff).re + diff.frobenius_norm().powi(2) / (2.0 * step);
                if fc.is_finite() && fc <= bound + 1e-15 * fx.abs().max(1.0) {
                    accepted = Some((candidate, fc, diff.frobenius_norm() / step));
                    break;
                }
                step *= 0.5;
            }
            let Some((candidate, fc, gm)) = accepted else {
                return Err(Error::NoConvergence(format!("line search failed at iteration {iterations}")));
            };
            gm_norm = gm;
            // Near the optimum the certified decrease falls below the
            // rounding error of the objective itself.
            let slack = 1e-12 * fx.abs().max(1.0);
            if fc > fx + slack {
                break;
            }
            x = candidate;
            fx = fc.min(fx);
            if gm_norm < options.tol {
                break;
            }
            if self.likelihood == Likelihood::Multinomial {
                step *= 1.5;
            }
        }
        let converged = gm_norm < options.tol;
        let report = MleReport {
            iterations,
            converged,
            gradient_mapping_norm: gm_norm,
            objective: fx,
            residual: self.residual(&x),
            likelihood: self.likelihood,
        };
        Ok((x, report))
    }
}

/// Euclidean projection onto density matrices: eigenvalues projected onto
/// the probability simplex.
pub fn project_density(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(&m.hermitian_part())?;
    let values = project_simplex(&eig.values, 1.0);
    let mut out = ComplexMatrix::zeros(m.rows(), m.rows());
    for (k, &v) in values.iter().enumerate() {
        if v > 0.0 {
            let vec = eig.vector(k);
            out += &ComplexMatrix::outer(&vec, &vec).scale_real(v);
        }
    }
    Ok(out.hermitian_part())
}

fn gaussian_weights(shots: &Shots) -> Vec<f64> {
    match shots {
        Shots::Averaged { counts, single_shot_sigma, .. } => {
            let w: Vec<f64> = counts.iter().map(|&c| c as f64 / single_shot_sigma.powi(2)).collect();
            let mean = w.iter().sum::<f64>() / w.len().max(1) as f64;
            if mean > 0.0 {
                w.iter().map(|x| x / mean).collect()
            } else {
                w
            }
        }
        _ => vec![1.0; shots.len()],
    }
}

/// Likelihood model implied by the kind of data.
pub fn likelihood_for(shots: &Shots) -> Likelihood {
    match shots {
        Shots::Counts { .. } => Likelihood::Multinomial,
        _ => Likelihood::Gaussian,
    }
}

/// Unconstrained least-squares estimate `ρ = Σ r_m B_m` with the identity
/// component fixed by the trace.
pub fn linear_inversion(design: &TomographyDesign, values: &[f64]) -> Result<ComplexMatrix> {
    if values.len() != design.n_rows() {
        return Err(Error::DimensionMismatch(format!("{} records for {} rows", values.len(), design.n_rows())));
    }
    let d = design.dim() as f64;
    let r0 = 1.0 / d.sqrt();
    let reduced: Vec<Vec<f64>> = design.rows().iter().map(|row| row[1..].to_vec()).collect();
    let rhs: Vec<f64> = design.rows().iter().zip(values).map(|(row, y)| y - row[0] * r0).collect();
    let mut r = vec![r0];
    r.extend(svd_real(&reduced).solve(&rhs, 1e-10));
    Ok(design.basis().from_real_coordinates(&r))
}

/// Maximum-likelihood density matrix for a complete design.
pub fn mle_state(design: &TomographyDesign, shots: &Shots) -> Result<DensityMatrix> {
    Ok(mle_state_with(design, shots, &MleOptions::default())?.0)
}

pub fn mle_state_with(
    design: &TomographyDesign,
    shots: &Shots,
    options: &MleOptions,
) -> Result<(DensityMatrix, MleReport)> {
    let needed = design.basis().len();
    if design.rank() < needed {
        return Err(Error::IncompleteDesign { rank: design.rank(), needed });
    }
    shots.validate(design.n_rows())?;
    let likelihood = likelihood_for(shots);
    if likelihood == Likelihood::Multinomial && !design.measurement().is_povm() {
        return Err(Error::InvalidParameter("outcome counts need a POVM design".into()));
    }
    let data: Vec<f64> = match shots {
        Shots::Exact { values } => values.clone(),
        Shots::Averaged { means, .. } => means.clone(),
        Shots::Counts { counts } => counts.iter().map(|&c| c as f64).collect(),
    };
    let d = design.dim();
    let start = match likelihood {
        Likelihood::Gaussian => linear_inversion(design, &data)?,
        Likelihood::Multinomial => ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
    };
    let problem = Problem { functionals: design.effects(), data, weights: gaussian_weights(shots), likelihood };
    let (rho, report) = problem.solve(start, &project_density, options)?;
    if !report.converged && report.iterations >= options.max_iter {
        return Err(Error::NoConvergence(format!(
            "state MLE stopped after {} iterations (gradient mapping {:.3e}, residual {:.3e})",
            report.iterations, report.gradient_mapping_norm, report.residual
        )));
    }
    Ok((DensityMatrix::new(rho)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::table1_tomography_set;
    use crate::qcore::random::{haar_state, random_density};
    use crate::qcore::state_fidelity;
    use crate::tomography::design::{build_design, standard_ternary_set, Measurement};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table_design() -> TomographyDesign {
        build_design(&table1_tomography_set(), Measurement::degenerate_ground()).unwrap()
    }

    #[test]
    fn exact_data_from_pure_states() {
        let design = table_design();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let rho = DensityMatrix::pure(&haar_state(3, &mut rng)).unwrap();
            let shots = Shots::Exact { values: design.predict(rho.matrix()) };
            let (est, report) = mle_state_with(&design, &shots, &MleOptions::default()).unwrap();
            assert!(state_fidelity(&est, &rho).unwrap() > 0.999_999);
            assert!(est.matrix().max_abs_diff(rho.matrix()) < 1e-6, "report {report:?}");
        }
    }

    #[test]
    fn mixed_states_are_interior_fixed_points() {
        let design = table_design();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random_density(3, &mut rng);
        let est = mle_state(&design, &Shots::Exact { values: design.predict(&rho) }).unwrap();
        assert!(est.matrix().approx_eq(&rho, 1e-9));
    }

    #[test]
    fn noisy_data_still_give_a_density_matrix() {
        let design = table_design();
        let values = vec![1.4, -0.2, 0.3, -1.3, 0.9, -0.8, 0.1, 0.5, -1.2];
        let (est, report) = mle_state_with(&design, &Shots::Exact { values }, &MleOptions::default()).unwrap();
        assert!(report.converged);
        let eig = eig_hermitian(est.matrix()).unwrap();
        assert!(eig.values[0] >= -1e-12);
        assert!((est.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ground_state_counts() {
        let design = build_design(&standard_ternary_set(), Measurement::ternary()).unwrap();
        let rho = DensityMatrix::basis(3, 0);
        let counts: Vec<u64> = design.predict(rho.matrix()).iter().map(|p| (p * 1000.0).round() as u64).collect();
        let est = mle_state(&design, &Shots::Counts { counts }).unwrap();
        assert!(state_fidelity(&est, &rho).unwrap() >= 0.999);
    }

    #[test]
    fn averaged_ground_state_records() {
        let design = table_design();
        let rho = DensityMatrix::basis(3, 0);
        let means = design.predict(rho.matrix());
        let shots = Shots::Averaged { counts: vec![2000; means.len()], means, single_shot_sigma: 1.0 };
        let est = mle_state(&design, &shots).unwrap();
        assert!(state_fidelity(&est, &rho).unwrap() >= 0.999);
    }

    #[test]
    fn rejects_incomplete_design_and_bad_data() {
        let design = table_design();
        let partial = design.restrict(&[0, 1, 2, 3, 4, 5, 6]).unwrap();
        let err = mle_state(&partial, &Shots::Exact { values: vec![0.0; 7] }).unwrap_err();
        assert!(matches!(err, Error::IncompleteDesign { rank: 7, needed: 9 }));
        assert!(mle_state(&design, &Shots::Exact { values: vec![0.0; 3] }).is_err());
        assert!(mle_state(&design, &Shots::Counts { counts: vec![1; 9] }).is_err());
    }

    #[test]
    fn objective_never_increases() {
        let design = table_design();
        let values = vec![0.9, 0.1, -0.4, -0.9, 0.6, -0.6, 0.2, 0.4, -1.0];
        let problem = Problem {
            functionals: design.effects(),
            data: values.clone(),
            weights: vec![1.0; 9],
            likelihood: Likelihood::Gaussian,
        };
        let mut x = ComplexMatrix::identity(3).scale_real(1.0 / 3.0);
        let mut last = problem.objective(&x);
        for _ in 0..50 {
            let (next, _) = problem.solve(x.clone(), &project_density, &MleOptions { max_iter: 1, tol: 0.0 }).unwrap();
            let f = problem.objective(&next);
            assert!(f <= last + 1e-12 * last.max(1.0));
            last = f;
            x = next;
        }
    }

    #[test]
    fn shots_serialize_with_a_kind_tag() {
        let s = Shots::Counts { counts: vec![1, 2] };
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"kind":"counts","counts":[1,2]}"#);
        assert!(serde_json::from_str::<Shots>(r#"{"kind":"counts","counts":[1],"extra":0}"#).is_err());
    }
}
