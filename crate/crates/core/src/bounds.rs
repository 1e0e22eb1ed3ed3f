//! Upper bound `X` on the `x`-extent of the heteroclinic orbit.
//!
//! `X` solves `H(X) = E` on `x >= z`, where `E = s - z - z log(s/z)` is the
//! Lyapunov level at `(z, s)` with `s = (a0 + 1) w`. For each family the bound
//! also has a closed form (square root for the nonrelativistic law, Lambert W
//! for the relativistic ones) which is computed independently and compared.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lambert::{lambert_w, Branch};
use crate::lyapunov::h_unchecked;
use crate::model::{make_model, Family, ModelSpec, SystemModel, DOMAIN_GUARD};
use crate::par::{self, Strategy};
use crate::roots::{brent, expand_upper, ROOT_TOL};

/// Closed forms must match the H-inversion to this.
pub const AGREEMENT_TOL: f64 = 1e-9;

/// Grid size per axis for the sampled `a' - b' y < 0` hypothesis.
pub const RECTANGLE_GRID: usize = 200;

/// `s - z - z log(s/z)`.
pub fn excess_level(s: f64, z: f64) -> f64 {
    s - z - z * (s / z).ln()
}

/// Lyapunov level of the point `(z, (a0 + 1) w)`.
pub fn excess_e(model: &SystemModel) -> Result<f64> {
    let eq = model.equilibrium();
    let s = model.unstable_slope() * eq.w;
    if !(s > eq.z) {
        return Err(Error::Ordering {
            z: eq.z,
            w: eq.w,
            a0: model.a0(),
        });
    }
    Ok(excess_level(s, eq.z))
}

/// Unique `x >= z` with `H(x) = level`.
pub fn invert_h(model: &SystemModel, level: f64) -> Result<f64> {
    if !(level >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "H level {level} must be nonnegative"
        )));
    }
    let z = model.z();
    if level == 0.0 {
        return Ok(z);
    }
    let g = |x: f64| h_unchecked(model, x) - level;
    let hi = expand_upper(g, z, model.x_max(), 2.0 * DOMAIN_GUARD).map_err(|last| {
        Error::Unreachable {
            level,
            sup: last + level,
        }
    })?;
    brent(g, z, hi, ROOT_TOL, "H(x) - level")
}

/// Sampled check of the hypotheses behind the bound. Reports the first
/// failing hypothesis (by index) and where.
pub fn check_hypotheses(model: &SystemModel) -> Result<()> {
    let eq = model.equilibrium();
    let a0 = model.a0();
    let slope = a0 + 1.0;
    let top = if model.x_max().is_finite() {
        0.999 * model.x_max()
    } else {
        10.0 * eq.z
    };
    let n = 1000;

    for k in 0..=n {
        let x = top * k as f64 / n as f64;
        if model.b(x) < 0.0 {
            return Err(Error::Hypothesis {
                index: 0,
                x,
                y: f64::NAN,
                detail: "b(x) >= 0",
            });
        }
        if model.r(x) < -1e-12 {
            return Err(Error::Hypothesis {
                index: 1,
                x,
                y: f64::NAN,
                detail: "z b(x) - a(x) = -r(x)(z - x) with r >= 0",
            });
        }
    }
    if !(a0 > 0.0) {
        return Err(Error::Hypothesis {
            index: 2,
            x: 0.0,
            y: f64::NAN,
            detail: "a(0) > 0",
        });
    }
    let resid = slope * eq.w * model.b(eq.w) - model.a(eq.w);
    if resid.abs() > 1e-10 * model.a(eq.w).abs().max(1.0) {
        return Err(Error::Hypothesis {
            index: 2,
            x: eq.w,
            y: slope * eq.w,
            detail: "(a(0)+1) w b(w) = a(w)",
        });
    }
    if !(slope * eq.w > eq.z && eq.z >= eq.w && eq.w > 0.0) {
        return Err(Error::Ordering {
            z: eq.z,
            w: eq.w,
            a0,
        });
    }
    for k in 0..=n {
        let x = eq.w * k as f64 / n as f64;
        if slope * eq.w * model.b(x) < model.a(x) - a0 - 1e-12 {
            return Err(Error::Hypothesis {
                index: 3,
                x,
                y: f64::NAN,
                detail: "(a(0)+1) w b(x) >= a(x) - a(0) for x <= w",
            });
        }
    }
    let m = RECTANGLE_GRID;
    for i in 0..m {
        let x = eq.w + (eq.z - eq.w) * i as f64 / (m - 1) as f64;
        for j in 0..m {
            let y = eq.z + (slope * eq.w - eq.z) * j as f64 / (m - 1) as f64;
            if !(model.da(x) - model.db(x) * y < 0.0) {
                return Err(Error::Hypothesis {
                    index: 4,
                    x,
                    y,
                    detail: "a'(x) - b'(x) y < 0 on [w, z] x [z, (a(0)+1) w]",
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub family: Family,
    pub z: f64,
    pub w: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "X_numeric")]
    pub x_numeric: f64,
    #[serde(rename = "X_closed")]
    pub x_closed: Option<f64>,
    pub agreement: Option<f64>,
}

/// The stiff-law closed form `1 + W0(-2^(1/3) e^(-4/3)) / 2`.
pub fn stiff_closed_form() -> f64 {
    let arg = -(2f64.cbrt()) * (-4.0f64 / 3.0).exp();
    1.0 + 0.5 * lambert_w(Branch::Principal, arg).expect("argument above -1/e")
}

/// The nonrelativistic closed form `2 + 2 sqrt(2 - log 3)`.
pub fn nonrelativistic_closed_form() -> f64 {
    2.0 + 2.0 * (2.0 - 3f64.ln()).sqrt()
}

pub fn closed_form_x(model: &SystemModel) -> Result<f64> {
    Ok(match model.family() {
        Family::Nonrelativistic => nonrelativistic_closed_form(),
        Family::StiffRelativistic => stiff_closed_form(),
        Family::ScaledRelativistic => stiff_closed_form() / model.scale(),
        Family::KappaFamily => kappa_constants(model.kappa().unwrap_or(1.0))?.x_closed,
    })
}

pub fn bound_x(model: &SystemModel) -> Result<BoundReport> {
    check_hypotheses(model)?;
    let eq = model.equilibrium();
    let e = excess_e(model)?;
    let x_numeric = invert_h(model, e)?;
    let x_closed = closed_form_x(model)?;
    Ok(BoundReport {
        family: model.family(),
        z: eq.z,
        w: eq.w,
        e,
        x_numeric,
        x_closed: Some(x_closed),
        agreement: Some((x_numeric - x_closed).abs()),
    })
}

/// Constants of the `p = kappa c^2 rho` family as printed, after correcting
/// the `log(1-x)` coefficient of `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaConstants {
    pub kappa: f64,
    pub z: f64,
    pub w: f64,
    /// Coefficient of `x` over coefficient of `-log(1-x)` in `H`.
    pub alpha: f64,
    /// Constant of `H` making `H(z) = 0`.
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "E")]
    pub e: f64,
    /// `8 kappa^2 delta = (5 kappa + 1)(kappa + 1)^2`.
    pub delta: f64,
    /// Additive constant of `2V = 2y - (5 + 1/kappa)x - 2z log(y (1-x)^delta) + C`.
    #[serde(rename = "C")]
    pub c: f64,
    /// Coefficient of `-log(1-x)` in `H`, equal to `z delta`.
    pub log_coefficient: f64,
    /// `1 + W0(-alpha exp(-alpha - (E - D)/log_coefficient)) / alpha`.
    pub x_closed: f64,
    pub printed: PrintedKappaForm,
}

/// The commonly quoted closed form, with log coefficient
/// `(1+k)/(2k) (4k + (1+k)^3)/(4k + (1+k)^2)`. Matches the corrected form only
/// at `kappa = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrintedKappaForm {
    pub log_coefficient: f64,
    pub alpha: f64,
    #[serde(rename = "D")]
    pub d: f64,
    pub x_closed: f64,
}

fn kappa_closed(alpha: f64, e: f64, d: f64, c: f64) -> Result<f64> {
    let arg = -alpha * (-alpha - (e - d) / c).exp();
    Ok(1.0 + lambert_w(Branch::Principal, arg)? / alpha)
}

/// `E` from its explicit display in `kappa`.
pub fn kappa_excess_display(k: f64) -> f64 {
    let q = 3.0 * k * k + 8.0 * k + 1.0;
    let p = 4.0 * k + (1.0 + k).powi(2);
    12.0 * k / q - 4.0 * k / p - 4.0 * k / p * ((3.0 * k * k + 18.0 * k + 3.0) / q).ln()
}

pub fn kappa_constants(kappa: f64) -> Result<KappaConstants> {
    ModelSpec::kappa(kappa).validate()?;
    let k = kappa;
    let p2 = 4.0 * k + (1.0 + k).powi(2);
    let p3 = 4.0 * k + (1.0 + k).powi(3);
    let z = 4.0 * k / p2;
    let w = 4.0 * k / (3.0 * k * k + 8.0 * k + 1.0);
    let lin = (1.0 + 5.0 * k) / (2.0 * k);
    let e = kappa_excess_display(k);

    let delta = (5.0 * k + 1.0) * (k + 1.0).powi(2) / (8.0 * k * k);
    let log_coefficient = z * delta;
    let alpha = lin / log_coefficient;
    let d = lin * z + log_coefficient * (-z).ln_1p();
    let c = (3.0 + 1.0 / k) * z + 2.0 * z * (z * (1.0 - z).powf(delta)).ln();
    let x_closed = kappa_closed(alpha, e, d, log_coefficient)?;

    let printed_coefficient = (1.0 + k) / (2.0 * k) * p3 / p2;
    let printed_alpha = (1.0 + 5.0 * k) / (1.0 + k) * p2 / p3;
    let printed_d =
        2.0 * (1.0 + 5.0 * k) / p2 + printed_coefficient * ((1.0 + k).powi(2) / p2).ln();
    let printed = PrintedKappaForm {
        log_coefficient: printed_coefficient,
        alpha: printed_alpha,
        d: printed_d,
        x_closed: kappa_closed(printed_alpha, e, printed_d, printed_coefficient)?,
    };

    Ok(KappaConstants {
        kappa,
        z,
        w,
        alpha,
        d,
        e,
        delta,
        c,
        log_coefficient,
        x_closed,
        printed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub kappa: f64,
    pub z: f64,
    pub w: f64,
    pub alpha: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "X_closed")]
    pub x_closed: f64,
    #[serde(rename = "X_numeric")]
    pub x_numeric: f64,
}

/// Bound over `n` equispaced values of kappa in `[lo, hi]`.
pub fn sweep_kappa(lo: f64, hi: f64, n: usize, strategy: Strategy) -> Result<Vec<SweepRow>> {
    if n == 0 || !(lo > 0.0 && lo <= hi && hi <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "kappa sweep needs 0 < lo <= hi <= 1 and n >= 1 (got {lo}:{hi}:{n})"
        )));
    }
    let rows = par::map_range(n, strategy, |i| {
        let kappa = if n == 1 {
            lo
        } else {
            // exact at both ends
            let s = i as f64 / (n - 1) as f64;
            (1.0 - s) * lo + s * hi
        };
        let consts = kappa_constants(kappa)?;
        let model = make_model(ModelSpec::kappa(kappa))?;
        let report = bound_x(&model)?;
        Ok(SweepRow {
            kappa,
            z: consts.z,
            w: consts.w,
            alpha: consts.alpha,
            d: consts.d,
            e: consts.e,
            x_closed: consts.x_closed,
            x_numeric: report.x_numeric,
        })
    });
    rows.into_iter().collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "kappa,z,w,alpha,D,E,X_closed,X_numeric")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.kappa, r.z, r.w, r.alpha, r.d, r.e, r.x_closed, r.x_numeric
        )?;
    }
    Ok(())
}
