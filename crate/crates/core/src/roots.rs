//! Bracketed scalar root finding (Brent's bisection / secant / inverse
//! quadratic hybrid) plus bracket expansion toward a domain limit.

use crate::error::{Error, Result};

/// Absolute tolerance used for every structural root in the crate.
pub const ROOT_TOL: f64 = 1e-12;

const MAX_ITER: usize = 200;

/// Find a root of `f` in `[lo, hi]`. The endpoints must bracket a sign change
/// (a zero at either endpoint is accepted).
pub fn brent<F>(f: F, lo: f64, hi: f64, tol: f64, what: &'static str) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::NoRoot { what, lo, hi });
    }

    let mut c = a;
    let mut fc = fa;
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // interpolation step
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NoRoot { what, lo, hi });
        }
    }
    Ok(b)
}

/// Walk from `lo` toward `limit` until `f` changes sign relative to `f(lo)`.
///
/// For a finite `limit` the probes approach it geometrically but never come
/// closer than `guard`; for an infinite limit the step doubles. Returns the
/// first probe with opposite sign, or `None` together with the last finite
/// value seen.
pub fn expand_upper<F>(f: F, lo: f64, limit: f64, guard: f64) -> std::result::Result<f64, f64>
where
    F: Fn(f64) -> f64,
{
    let f_lo = f(lo);
    let mut last = f_lo;
    if limit.is_finite() {
        let span = limit - lo;
        let mut gap = 0.5 * span;
        while gap > guard {
            let x = limit - gap;
            let v = f(x);
            if !v.is_finite() {
                break;
            }
            if v.signum() != f_lo.signum() || v == 0.0 {
                return Ok(x);
            }
            last = v;
            gap *= 0.5;
        }
        Err(last)
    } else {
        let mut step = lo.abs().max(1.0);
        for _ in 0..1100 {
            let x = lo + step;
            let v = f(x);
            if !v.is_finite() {
                break;
            }
            if v.signum() != f_lo.signum() || v == 0.0 {
                return Ok(x);
            }
            last = v;
            step *= 2.0;
        }
        Err(last)
    }
}
