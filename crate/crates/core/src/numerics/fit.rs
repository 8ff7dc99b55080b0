//! Levenberg-Marquardt least squares with a central-difference Jacobian.

use crate::error::{Error, Result};
use crate::qcore::linalg::svd_real;

#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: Vec<f64>,
    /// Residual sum of squares at `params`.
    pub rss: f64,
    pub iterations: usize,
}

/// Minimizes `Σ (model(p, x_k) − y_k)²` starting from `initial`.
pub fn levenberg_marquardt(
    model: impl Fn(&[f64], f64) -> f64,
    xs: &[f64],
    ys: &[f64],
    initial: &[f64],
    max_iter: usize,
) -> Result<FitResult> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch("fit abscissae and ordinates differ in length".into()));
    }
    if xs.len() < initial.len() {
        return Err(Error::InvalidParameter("fewer data points than fit parameters".into()));
    }
    let np = initial.len();
    let residuals = |p: &[f64]| -> Vec<f64> { xs.iter().zip(ys).map(|(&x, &y)| model(p, x) - y).collect() };
    let rss_of = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut p = initial.to_vec();
    let mut r = residuals(&p);
    let mut rss = rss_of(&r);
    if !rss.is_finite() {
        return Err(Error::NoConvergence("fit model is not finite at the initial guess".into()));
    }
    let mut lambda = 1e-3;
    for iter in 0..max_iter {
        let jac: Vec<Vec<f64>> = (0..np)
            .map(|k| {
                let h = 1e-7 * p[k].abs().max(1e-7);
                let mut hi = p.clone();
                let mut lo = p.clone();
                hi[k] += h;
                lo[k] -= h;
                let (rh, rl) = (residuals(&hi), residuals(&lo));
                rh.iter().zip(&rl).map(|(a, b)| (a - b) / (2.0 * h)).collect()
            })
            .collect();
        let mut jtj = vec![vec![0.0; np]; np];
        let mut jtr = vec![0.0; np];
        for a in 0..np {
            for b in 0..np {
                jtj[a][b] = jac[a].iter().zip(&jac[b]).map(|(u, v)| u * v).sum();
            }
            jtr[a] = jac[a].iter().zip(&r).map(|(u, v)| u * v).sum();
        }

        let mut improved = false;
        for _ in 0..40 {
            let mut damped = jtj.clone();
            for (a, row) in damped.iter_mut().enumerate() {
                row[a] += lambda * jtj[a][a].max(1e-300);
            }
            let neg: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let step = svd_real(&damped).solve(&neg, 1e-14);
            let trial: Vec<f64> = p.iter().zip(&step).map(|(a, b)| a + b).collect();
            let tr = residuals(&trial);
            let trss = rss_of(&tr);
            if trss.is_finite() && trss <= rss {
                let rel = (rss - trss) / rss.max(1e-300);
                let step_small = step.iter().zip(&p).all(|(s, v)| s.abs() <= 1e-12 * (v.abs() + 1e-12));
                p = trial;
                r = tr;
                rss = trss;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                if rel < 1e-15 || step_small {
                    return Ok(FitResult { params: p, rss, iterations: iter + 1 });
                }
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            return Ok(FitResult { params: p, rss, iterations: iter + 1 });
        }
    }
    Err(Error::NoConvergence(format!("least-squares fit exceeded {max_iter} iterations (rss {rss:.3e})")))
}
