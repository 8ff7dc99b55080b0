//! Where χ12 vanishes, to second order and exactly, for a few couplings,
//! and how the exact crossing drifts away from δ = α as g grows.

use qutritlab::device::{dressed_cavity_pull, find_sweet_spot, DeviceParams, SweetSpotMode};

fn main() -> qutritlab::Result<()> {
    let (f_r, alpha, kappa) = (7182.0, -310.0, 1.71);
    println!("    g   second order     exact       f01      chi01 at exact");
    for g in [5.0, 10.0, 20.0, 40.0] {
        let device = DeviceParams::duffing(f_r, g, f_r + alpha, alpha, kappa);
        let bracket = (alpha - 100.0, alpha + 100.0);
        let approx = find_sweet_spot(&device, bracket, SweetSpotMode::SecondOrder)?;
        let exact = find_sweet_spot(&device, bracket, SweetSpotMode::Exact)?;
        let pulls = dressed_cavity_pull(&device.with_delta(exact.delta)?)?;
        println!(
            "{g:>5.1}   {:>10.4}   {:>10.4}   {:>9.3}   {:>8.4}",
            approx.delta, exact.delta, exact.f01, pulls.chi01
        );
    }
    Ok(())
}
