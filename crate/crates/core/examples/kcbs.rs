//! Pentagram of KCBS rays: neighbouring rays are orthogonal, so their binary
//! observables should be compatible. The degenerate readout keeps them so,
//! while a three-outcome readout does not.

use std::f64::consts::PI;

use qutritlab::contextuality::{default_state_set, epsilon_exact, epsilon_uv, BinaryObservable, MeasurementProcedure};
use qutritlab::qcore::matrix::basis_ket;
use qutritlab::qcore::{DensityMatrix, C64};

fn kcbs_ray(k: usize) -> Vec<C64> {
    let cos2 = (PI / 5.0).cos() / (1.0 + (PI / 5.0).cos());
    let (c, s) = (cos2.sqrt(), (1.0 - cos2).sqrt());
    let phi = 4.0 * PI * k as f64 / 5.0;
    vec![C64::new(c, 0.0), C64::new(s * phi.cos(), 0.0), C64::new(s * phi.sin(), 0.0)]
}

fn main() -> qutritlab::Result<()> {
    let rays: Vec<Vec<C64>> = (0..5).map(kcbs_ray).collect();
    let states = default_state_set(500, 3);
    println!("pair  |<u|v>|    eps(binary)  eps(ternary)");
    for k in 0..5 {
        let (u, v) = (&rays[k], &rays[(k + 1) % 5]);
        let overlap: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
        let binary = epsilon_exact(&MeasurementProcedure::ideal_binary(u)?, &MeasurementProcedure::ideal_binary(v)?)?;
        let ternary = epsilon_uv(&MeasurementProcedure::ternary(u)?, &MeasurementProcedure::ternary(v)?, &states)?;
        println!("{k}-{}   {:.1e}    {binary:.1e}      {:.4}", (k + 1) % 5, overlap.norm(), ternary.epsilon);
    }

    let rho = DensityMatrix::pure(&basis_ket(3, 0))?;
    let mut sum = 0.0;
    for k in 0..5 {
        let a = BinaryObservable::new(&rays[k])?;
        let b = BinaryObservable::new(&rays[(k + 1) % 5])?;
        let product = a.observable().matrix().matmul(b.observable().matrix())?;
        sum += rho.matrix().matmul(&product)?.trace().re;
    }
    println!(
        "sum of <A_k A_k+1> on |0>: {sum:.6} (noncontextual bound -3, quantum minimum {:.6})",
        5.0 - 4.0 * 5f64.sqrt()
    );
    Ok(())
}
