//! The closed-form pointer-state coherence factors checked against a direct
//! integration of the qutrit ⊗ cavity master equation.

use std::f64::consts::PI;

use qutritlab::qcore::{ComplexMatrix, C64};
use qutritlab::readout::{coherence_matrix, coherence_matrix_at, ReadoutConfig};

const N_CAV: usize = 12;

fn annihilation() -> ComplexMatrix {
    ComplexMatrix::from_fn(
        N_CAV,
        N_CAV,
        |r, c| {
            if c == r + 1 {
                C64::new((c as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        },
    )
}

/// d/dt X for the (i, j) block of the joint density matrix: each qutrit
/// level sees its own cavity detuning, all blocks share the drive and the
/// photon loss.
fn block_rhs(cfg: &ReadoutConfig, i: usize, j: usize, driven: bool, x: &ComplexMatrix) -> ComplexMatrix {
    let a = annihilation();
    let ad = a.adjoint();
    let n = &ad * &a;
    let eps = if driven { cfg.amplitude } else { 0.0 };
    let drive = (&ad - &a).scale(C64::new(0.0, eps));
    let h = |k: usize| &n.scale_real(2.0 * PI * cfg.detuning(k)) + &drive;
    let minus_i = C64::new(0.0, -1.0);
    let comm = &(&h(i) * x) - &(x * &h(j));
    let kappa = 2.0 * PI * cfg.kappa;
    let jump = &(&a * x) * &ad;
    let anti = &(&n * x) + &(x * &n);
    &comm.scale(minus_i) + &(&jump - &anti.scale_real(0.5)).scale_real(kappa)
}

fn integrate_block(cfg: &ReadoutConfig, i: usize, j: usize, t_end: f64, dt: f64) -> C64 {
    let mut x = ComplexMatrix::zeros(N_CAV, N_CAV);
    x[(0, 0)] = C64::new(1.0, 0.0);
    let mut t = 0.0;
    while t < t_end - 1e-12 {
        let seg_end = if t < cfg.duration { cfg.duration.min(t_end) } else { t_end };
        let driven = t < cfg.duration;
        let steps = ((seg_end - t) / dt).ceil() as usize;
        let h = (seg_end - t) / steps as f64;
        for _ in 0..steps {
            let k1 = block_rhs(cfg, i, j, driven, &x);
            let k2 = block_rhs(cfg, i, j, driven, &(&x + &k1.scale_real(0.5 * h)));
            let k3 = block_rhs(cfg, i, j, driven, &(&x + &k2.scale_real(0.5 * h)));
            let k4 = block_rhs(cfg, i, j, driven, &(&x + &k3.scale_real(h)));
            let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
            x = &x + &incr.scale_real(h / 6.0);
        }
        t = seg_end;
    }
    x.trace()
}

fn config() -> ReadoutConfig {
    ReadoutConfig::new(7182.0, [1.3, -0.45, 0.35], 1.71, 6.0, 0.35)
}

#[test]
fn coherence_factors_match_master_equation_after_ring_down() {
    let cfg = config();
    let closed = coherence_matrix(&cfg);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let direct = integrate_block(&cfg, i, j, 3.5, 1e-3);
        let diff = (direct - closed[(i, j)]).norm();
        assert!(diff < 1e-6, "({i},{j}): master equation {direct} vs closed form {}", closed[(i, j)]);
    }
}

#[test]
fn coherence_factors_match_master_equation_mid_pulse() {
    let cfg = config();
    let t = 0.2;
    let closed = coherence_matrix_at(&cfg, t);
    for (i, j) in [(0, 1), (1, 2)] {
        let direct = integrate_block(&cfg, i, j, t, 1e-3);
        let diff = (direct - closed[(i, j)]).norm();
        assert!(diff < 1e-6, "({i},{j}): master equation {direct} vs closed form {}", closed[(i, j)]);
    }
}

#[test]
fn diagonal_blocks_keep_unit_trace() {
    let cfg = config();
    let direct = integrate_block(&cfg, 1, 1, 1.0, 1e-3);
    assert!((direct - C64::new(1.0, 0.0)).norm() < 1e-6);
}
