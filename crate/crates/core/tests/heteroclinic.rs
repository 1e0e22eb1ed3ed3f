use std::ops::ControlFlow;

use compactness::bounds::bound_x;
use compactness::lyapunov::v_unchecked;
use compactness::model::{make_model, ModelSpec, SystemModel};
use compactness::ode::{integrate, Tolerances};
use compactness::trajectory::{
    shoot_heteroclinic, verify_lyapunov_monotone, IntegratorConfig, Trajectory,
};

fn families() -> Vec<SystemModel> {
    [
        ModelSpec::nonrelativistic(),
        ModelSpec::stiff(),
        ModelSpec::scaled(ModelSpec::DEFAULT_SCALE),
        ModelSpec::kappa(1.0 / 3.0),
        ModelSpec::kappa(0.1),
    ]
    .into_iter()
    .map(|s| make_model(s).unwrap())
    .collect()
}

fn shoot(m: &SystemModel, cfg: IntegratorConfig) -> Trajectory {
    // tiny z (scaled law) needs a proportionally tiny launch offset
    let cfg = IntegratorConfig {
        eps_start: cfg.eps_start.min(1e-5 * m.z()),
        ..cfg
    };
    shoot_heteroclinic(m, &cfg).unwrap()
}

#[test]
fn every_family_connects_below_its_bound() {
    for m in families() {
        let t = shoot(&m, IntegratorConfig::default());
        assert!(t.converged, "{:?}", m.spec());
        let last = t.last().unwrap();
        let z = m.z();
        let d = (last.x - z).hypot(last.y - z);
        assert!(d < 1e-6 * z.max(1.0), "{:?}: {d}", m.spec());
        let bound = bound_x(&m).unwrap();
        assert!(t.max_x < bound.x_numeric, "{:?}", m.spec());
        assert!(t.max_x > z);
        assert!(verify_lyapunov_monotone(&t).unwrap() <= 1e-9);
        assert!(t.samples.windows(2).all(|w| w[1].t > w[0].t));
    }
}

#[test]
fn known_maxima() {
    let stiff = make_model(ModelSpec::stiff()).unwrap();
    let t = shoot(&stiff, IntegratorConfig::default());
    assert!(
        (t.max_x - 0.543_623_641_014_675).abs() < 1e-8,
        "{}",
        t.max_x
    );
    let nonrel = make_model(ModelSpec::nonrelativistic()).unwrap();
    let t = shoot(&nonrel, IntegratorConfig::default());
    assert!(
        (t.max_x - 2.517_551_324_415_656).abs() < 1e-8,
        "{}",
        t.max_x
    );
}

#[test]
fn launch_offset_robustness() {
    for m in families() {
        let base = shoot(&m, IntegratorConfig::default());
        let eps = IntegratorConfig::default().eps_start.min(1e-5 * m.z());
        let half = shoot(
            &m,
            IntegratorConfig {
                eps_start: 0.5 * eps,
                ..Default::default()
            },
        );
        assert!((base.max_x - half.max_x).abs() < 1e-4, "{:?}", m.spec());
    }
}

#[test]
fn tolerance_convergence() {
    for m in families() {
        let base = shoot(&m, IntegratorConfig::default());
        let tight = shoot(
            &m,
            IntegratorConfig {
                rel_tol: 0.5e-10,
                ..Default::default()
            },
        );
        assert!((base.max_x - tight.max_x).abs() < 1e-6, "{:?}", m.spec());
    }
}

#[test]
fn orbit_stays_below_unstable_tangent() {
    for m in families() {
        let t = shoot(&m, IntegratorConfig::default());
        let slope = m.unstable_slope();
        for s in &t.samples[1..] {
            assert!(
                s.y <= slope * s.x * (1.0 + 1e-9),
                "{:?} at t = {}",
                m.spec(),
                s.t
            );
        }
    }
}

#[test]
fn deterministic() {
    let m = make_model(ModelSpec::kappa(0.4)).unwrap();
    let a = shoot(&m, IntegratorConfig::default());
    let b = shoot(&m, IntegratorConfig::default());
    assert_eq!(a, b);
}

fn distance_to_polyline(t: &Trajectory, x: f64, y: f64) -> f64 {
    t.samples
        .windows(2)
        .map(|w| {
            let (ax, ay, bx, by) = (w[0].x, w[0].y, w[1].x, w[1].y);
            let (dx, dy) = (bx - ax, by - ay);
            let len2 = dx * dx + dy * dy;
            let s = if len2 > 0.0 {
                (((x - ax) * dx + (y - ay) * dy) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (x - ax - s * dx).hypot(y - ay - s * dy)
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn time_reversal_retraces_orbit() {
    for spec in [
        ModelSpec::stiff(),
        ModelSpec::nonrelativistic(),
        ModelSpec::kappa(1.0 / 3.0),
    ] {
        let m = make_model(spec).unwrap();
        let t = shoot(&m, IntegratorConfig::default());
        let z = m.z();
        // a recorded point that is already close to (z, z)
        let start = t
            .samples
            .iter()
            .find(|s| s.t > t.t_max_x && (s.x - z).hypot(s.y - z) < 0.05 * z)
            .copied()
            .unwrap();
        let tol = Tolerances {
            rel: 1e-11,
            abs: 1e-13,
        };
        let mut worst: f64 = 0.0;
        let mut reached_origin_region = false;
        integrate(
            |s| {
                let (dx, dy) = m.field(s[0], s[1]);
                [-dx, -dy]
            },
            0.0,
            [start.x, start.y],
            start.t,
            tol,
            1_000_000,
            |step| {
                let [x, y] = step.y1;
                worst = worst.max(distance_to_polyline(&t, x, y));
                if x < 0.05 * z {
                    reached_origin_region = true;
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            },
        );
        assert!(reached_origin_region, "{spec:?}");
        assert!(worst < 1e-3, "{spec:?}: {worst}");
    }
}

#[test]
fn lyapunov_decreases_strictly_along_orbit() {
    let m = make_model(ModelSpec::stiff()).unwrap();
    let t = shoot(&m, IntegratorConfig::default());
    for s in &t.samples {
        assert_eq!(s.v, v_unchecked(&m, s.x, s.y));
    }
    let first = t.samples.first().unwrap().v;
    let last = t.samples.last().unwrap().v;
    assert!(first > 5.0 && last < 1e-12);
}
