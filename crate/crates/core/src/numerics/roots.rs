//! Bracketing root finders.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Brent's method on `[lo, hi]`. `f(lo)` and `f(hi)` must differ in sign
/// (a zero at either end is returned directly).
pub fn brent(quantity: &str, mut f: impl FnMut(f64) -> Result<f64>, lo: f64, hi: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { quantity: quantity.to_string(), lo, hi });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NoConvergence(format!("Brent search for {quantity} did not converge")))
}

/// Smallest `x` in `[lo, hi]` with `count(x) > k`, located by bisection on a
/// monotone non-decreasing counting function (a Sturm count, for example).
pub fn bisect_count(count: impl Fn(f64) -> usize, k: usize, lo: f64, hi: f64, xtol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    while b - a > xtol * (1.0 + a.abs().max(b.abs())) {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if count(mid) > k {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root_of_two() {
        let r = brent("x^3-2", |x| Ok(x * x * x - 2.0), 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_missing_sign_change() {
        let e = brent("x^2+1", |x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12);
        assert!(matches!(e, Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn count_bisection_locates_step() {
        let x = bisect_count(|x| usize::from(x > 0.3) + usize::from(x > 0.7), 1, 0.0, 1.0, 1e-14);
        assert!((x - 0.7).abs() < 1e-12);
    }
}
