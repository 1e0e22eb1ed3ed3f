//! Phase-portrait data: field samples and Lyapunov levels on a grid, with a
//! small static SVG rendering.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::bounds::excess_e;
use crate::error::{Error, Result};
use crate::lyapunov::{level_set_grid, v_unchecked, Interval, LevelSetGrid};
use crate::model::SystemModel;
use crate::par::{self, Strategy};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    pub dx: f64,
    pub dy: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Portrait {
    pub field: Vec<FieldSample>,
    pub levels: LevelSetGrid,
}

/// A window showing both stationary points, the trap region and the bound.
pub fn default_window(model: &SystemModel) -> (Interval, Interval) {
    let eq = model.equilibrium();
    let top = model.unstable_slope() * eq.w;
    let reach = excess_e(model)
        .ok()
        .and_then(|e| crate::bounds::invert_h(model, e).ok())
        .unwrap_or(2.0 * eq.z);
    let x_hi = (1.25 * reach).min(0.98 * model.x_max());
    (Interval::new(0.0, x_hi), Interval::new(0.0, 1.25 * top))
}

pub fn portrait(
    model: &SystemModel,
    x_range: Interval,
    y_range: Interval,
    nx: usize,
    ny: usize,
    strategy: Strategy,
) -> Result<Portrait> {
    let levels = level_set_grid(model, x_range, y_range, nx, ny, strategy)?;
    let rows = par::map_range(ny, strategy, |j| {
        let y = y_range.node(j, ny);
        (0..nx)
            .map(|i| {
                let x = x_range.node(i, nx);
                if model.in_domain(x) && y >= 0.0 {
                    let (dx, dy) = model.field(x, y);
                    let k = j * nx + i;
                    FieldSample {
                        x,
                        y,
                        dx,
                        dy,
                        v: levels.values[k],
                        valid: levels.valid[k],
                    }
                } else {
                    FieldSample {
                        x,
                        y,
                        dx: 0.0,
                        dy: 0.0,
                        v: 0.0,
                        valid: false,
                    }
                }
            })
            .collect::<Vec<_>>()
    });
    Ok(Portrait {
        field: rows.into_iter().flatten().collect(),
        levels,
    })
}

impl Portrait {
    /// Header `x,y,dx,dy,V,valid`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,dx,dy,V,valid")?;
        for s in &self.field {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                s.x,
                s.y,
                s.dx,
                s.dy,
                s.v,
                u8::from(s.valid)
            )?;
        }
        Ok(())
    }
}

/// Segments of the `level` contour of the grid (marching squares).
pub fn contour_segments(grid: &LevelSetGrid, level: f64) -> Vec<[(f64, f64); 2]> {
    let mut out = Vec::new();
    if grid.nx < 2 || grid.ny < 2 {
        return out;
    }
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals: Option<Vec<f64>> = corners.iter().map(|&(a, b)| grid.get(a, b)).collect();
            let Some(vals) = vals else { continue };
            let mut crossings = Vec::with_capacity(4);
            for e in 0..4 {
                let (p, q) = (e, (e + 1) % 4);
                let (vp, vq) = (vals[p] - level, vals[q] - level);
                if (vp < 0.0) != (vq < 0.0) {
                    let s = vp / (vp - vq);
                    let (ip, jp) = corners[p];
                    let (iq, jq) = corners[q];
                    let x = grid.x(ip) + s * (grid.x(iq) - grid.x(ip));
                    let y = grid.y(jp) + s * (grid.y(jq) - grid.y(jp));
                    crossings.push((x, y));
                }
            }
            match crossings.len() {
                2 => out.push([crossings[0], crossings[1]]),
                4 => {
                    out.push([crossings[0], crossings[1]]);
                    out.push([crossings[2], crossings[3]]);
                }
                _ => {}
            }
        }
    }
    out
}

struct Canvas {
    x: Interval,
    y: Interval,
    size: f64,
    pad: f64,
}

impl Canvas {
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let w = self.size - 2.0 * self.pad;
        let px = self.pad + w * (x - self.x.lo) / (self.x.hi - self.x.lo);
        let py = self.size - self.pad - w * (y - self.y.lo) / (self.y.hi - self.y.lo);
        (px, py)
    }

    fn inside(&self, x: f64, y: f64) -> bool {
        x >= self.x.lo && x <= self.x.hi && y >= self.y.lo && y <= self.y.hi
    }

    fn polyline(&self, pts: impl IntoIterator<Item = (f64, f64)>, colour: &str) -> String {
        let mut d = String::new();
        let mut pen_down = false;
        for (x, y) in pts {
            if !self.inside(x, y) || !x.is_finite() || !y.is_finite() {
                pen_down = false;
                continue;
            }
            let (px, py) = self.map(x, y);
            let _ = write!(d, "{}{px:.2},{py:.2} ", if pen_down { "L" } else { "M" });
            pen_down = true;
        }
        format!("<path d=\"{d}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.5\"/>\n")
    }
}

/// Static SVG: field arrows, Lyapunov levels (the level through
/// `(z, (a0+1)w)` highlighted), unstable tangent, both isoclines and the orbit.
pub fn render_svg(
    model: &SystemModel,
    portrait: &Portrait,
    orbit: Option<&Trajectory>,
) -> Result<String> {
    let grid = &portrait.levels;
    if grid.nx < 2 || grid.ny < 2 {
        return Err(Error::InvalidInput(
            "SVG output needs at least a 2x2 grid".into(),
        ));
    }
    let cv = Canvas {
        x: grid.x_range,
        y: grid.y_range,
        size: 640.0,
        pad: 40.0,
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">",
        cv.size
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let (x0, y0) = cv.map(cv.x.lo, cv.y.lo);
    let (x1, y1) = cv.map(cv.x.hi, cv.y.hi);
    let _ = writeln!(
        s,
        "<rect x=\"{x0:.2}\" y=\"{y1:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
        x1 - x0,
        y0 - y1
    );

    // arrows of uniform length
    let cell = (cv.size - 2.0 * cv.pad) / (grid.nx.max(grid.ny) as f64) * 0.4;
    let stride = (grid.nx.max(grid.ny) / 24).max(1);
    for f in &portrait.field {
        let (i, j) = (
            ((f.x - cv.x.lo) / (cv.x.hi - cv.x.lo) * (grid.nx - 1) as f64).round() as usize,
            ((f.y - cv.y.lo) / (cv.y.hi - cv.y.lo) * (grid.ny - 1) as f64).round() as usize,
        );
        if i % stride != 0 || j % stride != 0 || !f.valid {
            continue;
        }
        let (px, py) = cv.map(f.x, f.y);
        let (sx, sy) = (f.dx / (cv.x.hi - cv.x.lo), f.dy / (cv.y.hi - cv.y.lo));
        let norm = sx.hypot(sy);
        if norm == 0.0 || !norm.is_finite() {
            continue;
        }
        let len = cell * stride as f64;
        let (ex, ey) = (px + len * sx / norm, py - len * sy / norm);
        let _ = writeln!(
            s,
            "<line x1=\"{px:.2}\" y1=\"{py:.2}\" x2=\"{ex:.2}\" y2=\"{ey:.2}\" stroke=\"#999\" stroke-width=\"0.8\"/>\n<circle cx=\"{ex:.2}\" cy=\"{ey:.2}\" r=\"1.2\" fill=\"#999\"/>"
        );
    }

    let crucial = excess_e(model).ok();
    let mut levels: Vec<(f64, &str)> = Vec::new();
    if let Some(e) = crucial {
        for k in [0.125, 0.25, 0.5, 2.0] {
            levels.push((k * e, "#c9b3e6"));
        }
        levels.push((e, "#7b2cbf"));
    }
    for (level, colour) in levels {
        for [p, q] in contour_segments(grid, level) {
            s.push_str(&cv.polyline([p, q], colour));
        }
    }

    let eq = model.equilibrium();
    let slope = model.unstable_slope();
    let n = 200;
    let xs: Vec<f64> = (0..=n).map(|k| cv.x.node(k, n + 1)).collect();
    s.push_str(&cv.polyline(xs.iter().map(|&x| (x, slope * x)), "#1f77b4"));
    s.push_str(&cv.polyline(xs.iter().map(|&x| (x, x)), "#6b8e23"));
    if model.b_vanishes() {
        s.push_str(&cv.polyline([(eq.x0, cv.y.lo), (eq.x0, cv.y.hi)], "#ff7f0e"));
    } else {
        s.push_str(
            &cv.polyline(
                xs.iter()
                    .filter(|&&x| model.in_domain(x))
                    .map(|&x| (x, model.a(x) / model.b(x))),
                "#ff7f0e",
            ),
        );
    }
    if let Some(t) = orbit {
        s.push_str(&cv.polyline(t.samples.iter().map(|p| (p.x, p.y)), "black"));
    }
    let (zx, zy) = cv.map(eq.z, eq.z);
    let _ = writeln!(
        s,
        "<circle cx=\"{zx:.2}\" cy=\"{zy:.2}\" r=\"3\" fill=\"red\"/>"
    );
    s.push_str("</svg>\n");
    Ok(s)
}

/// `V` at the point `(z, (a0+1) w)`, the level set bounding the orbit.
pub fn crucial_level(model: &SystemModel) -> f64 {
    let eq = model.equilibrium();
    v_unchecked(model, eq.z, model.unstable_slope() * eq.w)
}
