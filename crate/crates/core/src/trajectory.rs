//! Shooting the heteroclinic orbit from the origin's unstable manifold into
//! `(z, z)`, plus sampled checks of the trap region that confines it.

use std::io::{self, Write};
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lyapunov::v_unchecked;
use crate::model::SystemModel;
use crate::ode::{self, State, Stop, Tolerances};
use crate::roots::{brent, ROOT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    /// Offset along the unstable eigenvector `[1, a0 + 1]` at launch.
    pub eps_start: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Arrival radius around `(z, z)`.
    pub converge_radius: f64,
    /// Arrival is also declared once `V` drops below this.
    pub v_threshold: f64,
    pub max_time: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            eps_start: 1e-6,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            converge_radius: 1e-8,
            v_threshold: 1e-14,
            max_time: 200.0,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self, z: f64) -> Result<()> {
        let positive = [
            self.eps_start,
            self.rel_tol,
            self.abs_tol,
            self.converge_radius,
            self.v_threshold,
            self.max_time,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) || self.max_steps == 0 {
            return Err(Error::InvalidInput(
                "integrator settings must be positive".into(),
            ));
        }
        if self.eps_start >= 1e-2 * z {
            return Err(Error::InvalidInput(format!(
                "eps_start = {} is not small against z = {z}",
                self.eps_start
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    #[serde(rename = "V")]
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    /// Maximum of `x`, refined between samples by Hermite interpolation.
    pub max_x: f64,
    pub t_max_x: f64,
    pub converged: bool,
    pub steps: usize,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// CSV with header `t,x,y,V`; floats use shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x,y,V")?;
        for s in &self.samples {
            writeln!(out, "{},{},{},{}", s.t, s.x, s.y, s.v)?;
        }
        Ok(())
    }
}

fn distance_to_equilibrium(model: &SystemModel, x: f64, y: f64) -> f64 {
    let z = model.z();
    (x - z).hypot(y - z)
}

/// Integrate the orbit leaving `(0,0)` along `[1, a0 + 1]` until it reaches
/// `(z, z)`.
///
/// Returns a trajectory with `converged == false` if `max_time` elapses first;
/// leaving the domain or exhausting `max_steps` is an error.
pub fn shoot_heteroclinic(model: &SystemModel, cfg: &IntegratorConfig) -> Result<Trajectory> {
    let z = model.z();
    cfg.validate(z)?;
    let eps = cfg.eps_start;
    let start: State = [eps, model.unstable_slope() * eps];
    let x_limit = model.x_limit();

    let rhs = |s: &State| {
        if s[0] < x_limit && s[0] > -x_limit {
            let (dx, dy) = model.field(s[0], s[1]);
            [dx, dy]
        } else {
            [f64::NAN, f64::NAN]
        }
    };

    let mut samples = vec![Sample {
        t: 0.0,
        x: start[0],
        y: start[1],
        v: v_unchecked(model, start[0], start[1]),
    }];
    let (mut max_x, mut t_max_x) = (start[0], 0.0);
    let mut converged = false;
    let mut exited: Option<(f64, State)> = None;

    let tol = Tolerances {
        rel: cfg.rel_tol,
        abs: cfg.abs_tol,
    };
    let outcome = ode::integrate(rhs, 0.0, start, cfg.max_time, tol, cfg.max_steps, |step| {
        let [x, y] = step.y1;
        if !(x >= 0.0 && x < x_limit && y > 0.0) {
            exited = Some((step.t1, step.y1));
            return ControlFlow::Break(());
        }
        let (mx, tm) = step.max_component(0);
        if mx > max_x {
            max_x = mx;
            t_max_x = tm;
        }
        let v = v_unchecked(model, x, y);
        samples.push(Sample {
            t: step.t1,
            x,
            y,
            v,
        });
        if distance_to_equilibrium(model, x, y) < cfg.converge_radius || v < cfg.v_threshold {
            converged = true;
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });

    if let Some((t, [x, y])) = exited {
        return Err(Error::DomainExit { t, x, y });
    }
    match outcome.stop {
        Stop::StepCap | Stop::StepUnderflow => {
            let [x, y] = outcome.y;
            if !(x < x_limit && y > 0.0) || outcome.stop == Stop::StepUnderflow {
                return Err(Error::DomainExit { t: outcome.t, x, y });
            }
            Err(Error::NonConvergence {
                steps: outcome.accepted,
                t: outcome.t,
                distance: distance_to_equilibrium(model, x, y),
            })
        }
        Stop::Requested | Stop::EndTime => Ok(Trajectory {
            samples,
            max_x,
            t_max_x,
            converged,
            steps: outcome.accepted,
        }),
    }
}

/// Largest increase of `V` between consecutive samples (0 for a single sample).
pub fn verify_lyapunov_monotone(traj: &Trajectory) -> Result<f64> {
    if traj.samples.is_empty() {
        return Err(Error::InvalidInput("empty trajectory".into()));
    }
    let mut worst = 0.0f64;
    for pair in traj.samples.windows(2) {
        if !(pair[1].t > pair[0].t) {
            return Err(Error::InvalidInput(format!(
                "samples not increasing in t at t = {}",
                pair[1].t
            )));
        }
        worst = worst.max(pair[1].v - pair[0].v);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapRegionReport {
    /// `max (dy/dx - (a0+1))` on `y = (a0+1)x`, `0 < x <= w`; must be `<= 0`.
    pub line_check: f64,
    /// `min y'` on `y = x`, `0 < x <= z`; must be `>= 0`.
    pub diagonal_check: f64,
    /// Whether the `y' = 0` isocline `x(y)` is nonincreasing on `[z, (a0+1)w]`;
    /// `None` when `b` vanishes and the isocline degenerates.
    pub isocline_monotone: Option<bool>,
    pub samples: usize,
}

const TRAP_TOL: f64 = 1e-12;

/// Sample the three boundary pieces of the trap region.
pub fn check_trap_region(model: &SystemModel, n: usize) -> Result<TrapRegionReport> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let eq = model.equilibrium();
    let slope = model.unstable_slope();

    let mut line_check = f64::NEG_INFINITY;
    for k in 1..=n {
        let x = eq.w * k as f64 / n as f64;
        let y = slope * x;
        let (dx, dy) = model.field(x, y);
        let margin = dy / dx - slope;
        line_check = line_check.max(margin);
        if margin > TRAP_TOL * slope {
            return Err(Error::TrapViolation {
                check: "line",
                x,
                y,
                margin,
            });
        }
    }

    let mut diagonal_check = f64::INFINITY;
    for k in 1..=n {
        let x = eq.z * k as f64 / n as f64;
        let (dx, dy) = model.field(x, x);
        if dx != 0.0 {
            return Err(Error::TrapViolation {
                check: "diagonal x'",
                x,
                y: x,
                margin: dx,
            });
        }
        diagonal_check = diagonal_check.min(dy);
        if dy < -TRAP_TOL {
            return Err(Error::TrapViolation {
                check: "diagonal",
                x,
                y: x,
                margin: dy,
            });
        }
    }

    let isocline_monotone = if model.b_vanishes() {
        None
    } else {
        let top = slope * eq.w;
        let mut prev = isocline_x(model, eq.z)?;
        for k in 1..=n {
            let y = eq.z + (top - eq.z) * k as f64 / n as f64;
            let x = isocline_x(model, y)?;
            if x > prev + TRAP_TOL {
                return Err(Error::TrapViolation {
                    check: "isocline",
                    x,
                    y,
                    margin: x - prev,
                });
            }
            prev = x;
        }
        Some(true)
    };

    Ok(TrapRegionReport {
        line_check,
        diagonal_check,
        isocline_monotone,
        samples: n,
    })
}

/// The `y' = 0` isocline: the root `x(y)` of `a(x) = y b(x)` in `[w, x0]`.
pub fn isocline_x(model: &SystemModel, y: f64) -> Result<f64> {
    if model.b_vanishes() {
        return Err(Error::InvalidInput(
            "isocline degenerates when b vanishes".into(),
        ));
    }
    let eq = model.equilibrium();
    let top = model.unstable_slope() * eq.w;
    if !(0.0..=top * (1.0 + 1e-12)).contains(&y) {
        return Err(Error::InvalidInput(format!("y = {y} outside [0, {top}]")));
    }
    let lo = eq.w * (1.0 - 1e-9);
    let hi = (eq.x0 * (1.0 + 1e-9)).min(model.x_limit());
    let x = brent(
        |x| model.a(x) - y * model.b(x),
        lo,
        hi,
        ROOT_TOL,
        "a(x) - y b(x)",
    )?;
    Ok(x.clamp(eq.w, eq.x0))
}
