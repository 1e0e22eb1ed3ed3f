//! Lyapunov function `V = zB(x) - A(x) + y - z - z log(y/z)`, its orbital
//! derivative, and the bound function `H(x) = zB(x) - A(x)`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemModel;
use crate::par::{self, Strategy};

fn check_point(model: &SystemModel, x: f64, y: f64) -> Result<()> {
    model.check_domain(x)?;
    if y > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveY(y))
    }
}

/// `V` without domain checks. Vanishes at `(z, z)`.
#[inline]
pub fn v_unchecked(model: &SystemModel, x: f64, y: f64) -> f64 {
    let z = model.z();
    h_unchecked(model, x) + y - z - z * (y / z).ln()
}

/// `H` without domain checks.
#[inline]
pub fn h_unchecked(model: &SystemModel, x: f64) -> f64 {
    model.z() * model.prim_b(x) - model.prim_a(x)
}

pub fn lyapunov_value(model: &SystemModel, x: f64, y: f64) -> Result<f64> {
    check_point(model, x, y)?;
    Ok(v_unchecked(model, x, y))
}

/// `dV/dt = -b(x)(y - z)^2 - r(x)(z - x)^2` along solutions.
pub fn lyapunov_derivative(model: &SystemModel, x: f64, y: f64) -> Result<f64> {
    check_point(model, x, y)?;
    Ok(derivative_unchecked(model, x, y))
}

#[inline]
pub fn derivative_unchecked(model: &SystemModel, x: f64, y: f64) -> f64 {
    let z = model.z();
    -model.b(x) * (y - z).powi(2) - model.r(x) * (z - x).powi(2)
}

/// `grad V . f` computed from the gradient `(zb - a, 1 - z/y)` and the field,
/// i.e. before the structural identity is used to complete the squares.
pub fn derivative_via_gradient(model: &SystemModel, x: f64, y: f64) -> f64 {
    let z = model.z();
    let (dx, dy) = model.field(x, y);
    (z * model.b(x) - model.a(x)) * dx + (1.0 - z / y) * dy
}

/// `H(x) = zB(x) - A(x)` on `[z, x_max)`, where it increases strictly.
#[allow(non_snake_case)]
pub fn H(model: &SystemModel, x: f64) -> Result<f64> {
    model.check_domain(x)?;
    if x < model.z() {
        return Err(Error::InvalidInput(format!(
            "H is only inverted on x >= z = {}, got {x}",
            model.z()
        )));
    }
    Ok(h_unchecked(model, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// `n` equispaced nodes including both ends (`lo` alone when `n == 1`).
    pub fn node(&self, i: usize, n: usize) -> f64 {
        if n <= 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64
        }
    }
}

/// Samples of `V` on a rectangular grid. Row `j` holds `y_j`, column `i` holds `x_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetGrid {
    pub x_range: Interval,
    pub y_range: Interval,
    pub nx: usize,
    pub ny: usize,
    /// Row-major; invalid cells hold 0.
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
}

impl LevelSetGrid {
    pub fn x(&self, i: usize) -> f64 {
        self.x_range.node(i, self.nx)
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_range.node(j, self.ny)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let k = j * self.nx + i;
        self.valid[k].then_some(self.values[k])
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,V,valid")?;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let k = j * self.nx + i;
                writeln!(
                    out,
                    "{},{},{},{}",
                    self.x(i),
                    self.y(j),
                    self.values[k],
                    u8::from(self.valid[k])
                )?;
            }
        }
        Ok(())
    }
}

pub fn level_set_grid(
    model: &SystemModel,
    x_range: Interval,
    y_range: Interval,
    nx: usize,
    ny: usize,
    strategy: Strategy,
) -> Result<LevelSetGrid> {
    let empty = |r: &Interval| !(r.lo <= r.hi) || !r.lo.is_finite() || !r.hi.is_finite();
    if nx == 0 || ny == 0 || empty(&x_range) || empty(&y_range) {
        return Err(Error::InvalidInput("empty level-set grid range".into()));
    }
    let rows = par::map_range(ny, strategy, |j| {
        let y = y_range.node(j, ny);
        (0..nx)
            .map(|i| {
                let x = x_range.node(i, nx);
                if model.in_domain(x) && y > 0.0 {
                    (v_unchecked(model, x, y), true)
                } else {
                    (0.0, false)
                }
            })
            .collect::<Vec<_>>()
    });
    let (values, valid) = rows.into_iter().flatten().unzip();
    Ok(LevelSetGrid {
        x_range,
        y_range,
        nx,
        ny,
        values,
        valid,
    })
}
