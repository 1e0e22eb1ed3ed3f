//! Dormand-Prince 5(4) integrator for planar autonomous systems with PI
//! step-size control.

use std::ops::ControlFlow;

pub type State = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

/// One accepted step: state and derivative at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptedStep {
    pub t0: f64,
    pub y0: State,
    pub f0: State,
    pub t1: f64,
    pub y1: State,
    pub f1: State,
}

impl AcceptedStep {
    /// Cubic Hermite interpolant of component `k` at `theta` in `[0, 1]`.
    pub fn hermite(&self, k: usize, theta: f64) -> f64 {
        let h = self.t1 - self.t0;
        let (p0, p1) = (self.y0[k], self.y1[k]);
        let (m0, m1) = (h * self.f0[k], h * self.f1[k]);
        let t2 = theta * theta;
        let t3 = t2 * theta;
        (2.0 * t3 - 3.0 * t2 + 1.0) * p0
            + (t3 - 2.0 * t2 + theta) * m0
            + (-2.0 * t3 + 3.0 * t2) * p1
            + (t3 - t2) * m1
    }

    /// Maximum of component `k` over the step using the Hermite interpolant.
    pub fn max_component(&self, k: usize) -> (f64, f64) {
        let mut best = if self.y0[k] >= self.y1[k] {
            (self.y0[k], self.t0)
        } else {
            (self.y1[k], self.t1)
        };
        // derivative of the cubic in theta: 3 c3 t^2 + 2 c2 t + c1
        let h = self.t1 - self.t0;
        let (p0, p1) = (self.y0[k], self.y1[k]);
        let (m0, m1) = (h * self.f0[k], h * self.f1[k]);
        let c3 = 2.0 * p0 + m0 - 2.0 * p1 + m1;
        let c2 = -3.0 * p0 - 2.0 * m0 + 3.0 * p1 - m1;
        let c1 = m0;
        let (qa, qb, qc) = (3.0 * c3, 2.0 * c2, c1);
        let mut roots = [f64::NAN; 2];
        if qa.abs() < 1e-300 {
            if qb != 0.0 {
                roots[0] = -qc / qb;
            }
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc >= 0.0 {
                let s = disc.sqrt();
                let q = -0.5 * (qb + s.copysign(qb));
                roots[0] = q / qa;
                if q != 0.0 {
                    roots[1] = qc / q;
                }
            }
        }
        for th in roots {
            if th > 0.0 && th < 1.0 {
                let v = self.hermite(k, th);
                if v > best.0 {
                    best = (v, self.t0 + th * h);
                }
            }
        }
        best
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    /// The step callback asked to stop.
    Requested,
    /// `t_end` reached.
    EndTime,
    /// Step budget exhausted.
    StepCap,
    /// Step size underflowed (e.g. the field is undefined ahead).
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub stop: Stop,
    pub t: f64,
    pub y: State,
    pub accepted: usize,
    pub rejected: usize,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

fn finite(s: &State) -> bool {
    s[0].is_finite() && s[1].is_finite()
}

fn initial_step<F: Fn(&State) -> State>(f: &F, y0: &State, f0: &State, tol: Tolerances) -> f64 {
    let norm = |v: &State, y: &State| {
        let s0 = tol.abs + tol.rel * y[0].abs();
        let s1 = tol.abs + tol.rel * y[1].abs();
        (0.5 * ((v[0] / s0).powi(2) + (v[1] / s1).powi(2))).sqrt()
    };
    let d0 = norm(y0, y0);
    let d1 = norm(f0, y0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1 = axpy(y0, h0, &[(1.0, f0)]);
    let f1 = f(&y1);
    let d2 = if finite(&f1) {
        let diff = [f1[0] - f0[0], f1[1] - f0[1]];
        norm(&diff, y0) / h0
    } else {
        f64::INFINITY
    };
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

/// Integrate `y' = f(y)` from `(t0, y0)` toward `t_end`.
///
/// `on_step` sees every accepted step; returning `ControlFlow::Break` stops
/// the integration after that step. Trial stages that produce non-finite
/// values are treated as rejected steps.
pub fn integrate<F, C>(
    f: F,
    t0: f64,
    y0: State,
    t_end: f64,
    tol: Tolerances,
    max_steps: usize,
    mut on_step: C,
) -> Outcome
where
    F: Fn(&State) -> State,
    C: FnMut(&AcceptedStep) -> ControlFlow<()>,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(&y);
    let mut h = initial_step(&f, &y, &k1, tol).min(t_end - t0);
    let mut err_old: f64 = 1e-4;
    let mut accepted = 0;
    let mut rejected = 0;
    let mut last_rejected = false;

    let outcome = |stop, t, y, accepted, rejected| Outcome {
        stop,
        t,
        y,
        accepted,
        rejected,
    };

    loop {
        if accepted >= max_steps {
            return outcome(Stop::StepCap, t, y, accepted, rejected);
        }
        if t >= t_end {
            return outcome(Stop::EndTime, t, y, accepted, rejected);
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return outcome(Stop::StepUnderflow, t, y, accepted, rejected);
        }
        h = h.min(t_end - t);

        let k2 = f(&axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(&axpy(
            &y,
            h,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        ));
        let k6 = f(&axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ));
        let y_new = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(&y_new);

        let stages_ok = [&k2, &k3, &k4, &k5, &k6, &k7, &y_new]
            .iter()
            .all(|s| finite(s));
        let err = if stages_ok {
            let mut acc = 0.0;
            for i in 0..2 {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
                acc += (e / sc).powi(2);
            }
            (0.5 * acc).sqrt()
        } else {
            f64::INFINITY
        };

        if err <= 1.0 {
            let err = err.max(1e-10);
            let mut fac = SAFETY * err.powf(-ALPHA) * err_old.powf(BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if last_rejected {
                fac = fac.min(1.0);
            }
            err_old = err;
            let step = AcceptedStep {
                t0: t,
                y0: y,
                f0: k1,
                t1: t + h,
                y1: y_new,
                f1: k7,
            };
            t += h;
            y = y_new;
            k1 = k7;
            accepted += 1;
            last_rejected = false;
            h *= fac;
            if on_step(&step).is_break() {
                return outcome(Stop::Requested, t, y, accepted, rejected);
            }
        } else {
            rejected += 1;
            last_rejected = true;
            let fac = if err.is_finite() {
                (SAFETY * err.powf(-0.2)).max(FAC_MIN)
            } else {
                0.25
            };
            h *= fac;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerances = Tolerances {
        rel: 1e-10,
        abs: 1e-12,
    };

    #[test]
    fn harmonic_oscillator_period() {
        let out = integrate(
            |y| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            2.0 * std::f64::consts::PI,
            TOL,
            100_000,
            |_| ControlFlow::Continue(()),
        );
        assert_eq!(out.stop, Stop::EndTime);
        assert!((out.y[0] - 1.0).abs() < 1e-8);
        assert!(out.y[1].abs() < 1e-8);
    }

    #[test]
    fn exponential_growth() {
        let out = integrate(
            |y| [y[0], -2.0 * y[1]],
            0.0,
            [1.0, 1.0],
            3.0,
            TOL,
            100_000,
            |_| ControlFlow::Continue(()),
        );
        assert!((out.y[0] / 3f64.exp() - 1.0).abs() < 1e-8);
        assert!((out.y[1] - (-6f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn hermite_max_of_sine() {
        // One step over the hump of sin; the interpolated max beats the endpoints.
        let step = AcceptedStep {
            t0: 1.4,
            y0: [1.4f64.sin(), 0.0],
            f0: [1.4f64.cos(), 0.0],
            t1: 1.8,
            y1: [1.8f64.sin(), 0.0],
            f1: [1.8f64.cos(), 0.0],
        };
        let (m, at) = step.max_component(0);
        assert!((m - 1.0).abs() < 1e-4);
        assert!((at - std::f64::consts::FRAC_PI_2).abs() < 1e-2);
    }

    #[test]
    fn callback_can_stop_and_step_cap_applies() {
        let mut n = 0;
        let out = integrate(
            |y| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            100.0,
            TOL,
            100_000,
            |_| {
                n += 1;
                if n == 5 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        );
        assert_eq!(out.stop, Stop::Requested);
        assert_eq!(out.accepted, 5);
        let out = integrate(
            |y| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            100.0,
            TOL,
            3,
            |_| ControlFlow::Continue(()),
        );
        assert_eq!(out.stop, Stop::StepCap);
    }

    #[test]
    fn non_finite_stage_shrinks_step() {
        // sqrt(1 - t) style blow-up: y' = 1/(1 - y) is undefined beyond y = 1.
        let out = integrate(
            |y| {
                [
                    if y[0] < 1.0 {
                        1.0 / (1.0 - y[0])
                    } else {
                        f64::NAN
                    },
                    0.0,
                ]
            },
            0.0,
            [0.0, 0.0],
            10.0,
            TOL,
            100_000,
            |_| ControlFlow::Continue(()),
        );
        assert!(out.y[0] < 1.0);
        assert_ne!(out.stop, Stop::EndTime);
    }
}
