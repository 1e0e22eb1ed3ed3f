//! Real branches of the Lambert W function, the inverse of `w -> w e^w`.
//!
//! Halley iteration seeded by the branch-point series near `-1/e` and by the
//! logarithmic asymptotics elsewhere; bisection takes over if Halley fails to
//! settle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `W0`, values `>= -1`, defined on `[-1/e, inf)`.
    Principal,
    /// `W-1`, values `<= -1`, defined on `[-1/e, 0)`.
    MinusOne,
}

impl Branch {
    fn name(self) -> &'static str {
        match self {
            Branch::Principal => "principal",
            Branch::MinusOne => "minus-one",
        }
    }
}

/// `1/e` split into a double and its rounding residual.
const INV_E_HI: f64 = 0.367_879_441_171_442_33;
const INV_E_LO: f64 = -1.242_875_367_278_836_3e-17;

const MAX_HALLEY: usize = 64;

/// `e * (x + 1/e)`, accurate near the branch point.
fn branch_distance(x: f64) -> f64 {
    std::f64::consts::E * ((x + INV_E_HI) + INV_E_LO)
}

/// Series of `W` about `-1/e` in `p = +-sqrt(2 (e x + 1))`.
fn branch_series(p: f64) -> f64 {
    const C: [f64; 8] = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17280.0,
        -221.0 / 8505.0,
        680_863.0 / 43_545_600.0,
    ];
    C.iter().rev().fold(0.0, |acc, c| acc * p + c)
}

fn seed(branch: Branch, x: f64, p: f64) -> f64 {
    match branch {
        Branch::Principal => {
            if p < 0.5 {
                branch_series(p)
            } else if x < 3.0 {
                x.ln_1p()
            } else {
                let l1 = x.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
        }
        Branch::MinusOne => {
            if p < 0.5 {
                branch_series(-p)
            } else {
                let l1 = (-x).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            }
        }
    }
}

fn halley(x: f64, mut w: f64) -> Option<f64> {
    for _ in 0..MAX_HALLEY {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let dw = f / denom;
        if !dw.is_finite() {
            return None;
        }
        let next = w - dw;
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs().max(1e-300) {
            return Some(next);
        }
        w = next;
    }
    None
}

fn bisect(x: f64, mut lo: f64, mut hi: f64) -> f64 {
    // w e^w is monotone on each branch interval; orient by value at lo.
    let increasing = lo * lo.exp() < hi * hi.exp();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let below = mid * mid.exp() < x;
        if below == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Evaluate `W` on the requested real branch.
pub fn lambert_w(branch: Branch, x: f64) -> Result<f64> {
    let out_of_domain = || Error::LambertDomain {
        arg: x,
        branch: branch.name(),
    };
    if x.is_nan() {
        return Err(out_of_domain());
    }
    let d = branch_distance(x);
    if d < 0.0 {
        // Allow the rounding of -1/e itself.
        if d > -4.0 * f64::EPSILON {
            return Ok(-1.0);
        }
        return Err(out_of_domain());
    }
    match branch {
        Branch::Principal => {
            if x == 0.0 {
                return Ok(0.0);
            }
            if x == f64::INFINITY {
                return Ok(f64::INFINITY);
            }
        }
        Branch::MinusOne => {
            if x >= 0.0 {
                return Err(out_of_domain());
            }
        }
    }
    let p = (2.0 * d).sqrt();
    if p < 1e-3 {
        return Ok(branch_series(match branch {
            Branch::Principal => p,
            Branch::MinusOne => -p,
        }));
    }
    let w0 = seed(branch, x, p);
    let inside = |w: f64| match branch {
        Branch::Principal => w >= -1.0,
        Branch::MinusOne => w <= -1.0,
    };
    match halley(x, w0) {
        Some(w) if inside(w) => Ok(w),
        _ => Ok(match branch {
            Branch::Principal => {
                let hi = if x > 0.0 {
                    x.ln_1p().max(1.0) + 1.0
                } else {
                    0.0
                };
                bisect(x, -1.0, hi)
            }
            Branch::MinusOne => {
                let mut lo: f64 = -2.0;
                while lo * lo.exp() < x {
                    lo *= 2.0;
                }
                bisect(x, lo, -1.0)
            }
        }),
    }
}
