//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
//! failure. Runs without the libtest harness so the report is always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use compactness::astro::{mass_radius_table, Provenance};
use compactness::bounds::{
    bound_x, kappa_constants, nonrelativistic_closed_form, stiff_closed_form,
};
use compactness::lambert::{lambert_w, Branch};
use compactness::lyapunov::{lyapunov_derivative, v_unchecked};
use compactness::model::{make_model, ModelSpec, SystemModel};
use compactness::stability::{analyze, linearize_origin};
use compactness::trajectory::{
    check_trap_region, shoot_heteroclinic, verify_lyapunov_monotone, IntegratorConfig,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Independent high-precision values (mpmath, 50 digits).
const STIFF_X: f64 = 0.693_415_963_972_890_7;
const NONREL_X: f64 = 3.898_828_808_852_331;
const RADIATION_PRINTED_X: f64 = 0.621_170_051_812_957_4;
const RADIATION_TRUE_X: f64 = 0.639_117_701_488_955_4;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn families() -> Vec<SystemModel> {
    [
        ModelSpec::nonrelativistic(),
        ModelSpec::stiff(),
        ModelSpec::scaled(ModelSpec::DEFAULT_SCALE),
        ModelSpec::kappa(1.0 / 3.0),
    ]
    .into_iter()
    .map(|s| make_model(s).expect("valid family"))
    .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn lyapunov_decrease() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst_sign = f64::NEG_INFINITY;
    let mut worst_rel: f64 = 0.0;
    for m in families() {
        let eq = m.equilibrium();
        let x_hi = (0.999 * m.x_max()).min(3.0 * eq.x0);
        let y_hi = 2.0 * m.unstable_slope() * eq.w;
        for _ in 0..10_000 {
            let x = rng.gen_range(1e-6 * x_hi..x_hi);
            let y = rng.gen_range(1e-6 * y_hi..y_hi);
            let d = match lyapunov_derivative(&m, x, y) {
                Ok(d) => d,
                Err(e) => return check(false, format!("{:?}: {e}", m.family())),
            };
            worst_sign = worst_sign.max(d);
            // steps scaled to the local length: distance to 0 and to the pole
            let hx = 6e-6 * x.min(m.x_max() - x);
            let hy = 6e-6 * y;
            let vx = (v_unchecked(&m, x + hx, y) - v_unchecked(&m, x - hx, y)) / (2.0 * hx);
            let vy = (v_unchecked(&m, x, y + hy) - v_unchecked(&m, x, y - hy)) / (2.0 * hy);
            let (dx, dy) = m.field(x, y);
            let scale = (vx * dx).abs() + (vy * dy).abs();
            let err = (vx * dx + vy * dy - d).abs() / scale.max(d.abs()).max(f64::MIN_POSITIVE);
            worst_rel = worst_rel.max(err);
        }
    }
    check(
        worst_sign <= 1e-12 && worst_rel <= 1e-6,
        format!(
            "max dV/dt = {worst_sign:.3e} (<= 1e-12), max fd rel err = {worst_rel:.3e} (<= 1e-6)"
        ),
    )
}

fn stability_identities() -> Outcome {
    let mut origin_exact = true;
    for m in families() {
        let o = linearize_origin(&m);
        let a0 = m.a0();
        let [s, u] = o.eigenpairs;
        origin_exact &= s.value == -1.0 && s.vector == [1.0, 0.0];
        origin_exact &= u.value == a0 && u.vector == [1.0, a0 + 1.0];
    }
    let stiff = analyze(&make_model(ModelSpec::stiff()).unwrap());
    let [l1, l2] = stiff.interior.eigenvalues;
    let target = Complex64::new(-1.0, 3f64.sqrt());
    let (e1, e2) = (
        (l1 - target).norm().min((l1 - target.conj()).norm()),
        (l2 - target.conj()).norm().min((l2 - target).norm()),
    );
    let conj_pair = (l1 - l2.conj()).norm() == 0.0;
    let nonrel = make_model(ModelSpec::nonrelativistic()).unwrap();
    let z = nonrel.z();
    let lhs = 4.0 * z * nonrel.r(z);
    let rhs = (1.0 - nonrel.a(z)).powi(2);
    let spiral = analyze(&nonrel).interior.discriminant < 0.0;
    check(
        origin_exact && e1.max(e2) <= 1e-12 && conj_pair && lhs == 8.0 && rhs == 1.0 && spiral,
        format!(
            "origin pairs exact: {origin_exact}; stiff |lambda - (-1 +- i sqrt3)| = {:.1e}; nonrel 4zr = {lhs} > (1-a)^2 = {rhs}",
            e1.max(e2)
        ),
    )
}

fn bound_reproduction() -> Outcome {
    let nonrel = bound_x(&make_model(ModelSpec::nonrelativistic()).unwrap()).unwrap();
    let nonrel_formula = 2.0 + 2.0 * (2.0 - 3f64.ln()).sqrt();
    let ok_nonrel = nonrel.x_closed == Some(nonrelativistic_closed_form())
        && (nonrelativistic_closed_form() - nonrel_formula).abs() <= 1e-15 * nonrel_formula
        && (nonrel.x_numeric - nonrel_formula).abs() <= 1e-9
        && rel(nonrel_formula, NONREL_X) <= 1e-15;

    let stiff = bound_x(&make_model(ModelSpec::stiff()).unwrap()).unwrap();
    let ok_stiff = rel(stiff_closed_form(), STIFF_X) <= 1e-14
        && STIFF_X < 0.7
        && (stiff.x_numeric - stiff_closed_form()).abs() <= 1e-9;

    let rad = kappa_constants(1.0 / 3.0).unwrap();
    let inv_alpha = 1.0 / rad.printed.alpha;
    let ok_rad = (inv_alpha - 25.0 / 42.0).abs() <= 1e-14
        && rel(rad.printed.x_closed, RADIATION_PRINTED_X) <= 1e-12
        && rad.printed.x_closed < 0.622
        && rel(rad.x_closed, RADIATION_TRUE_X) <= 1e-12;

    let one = kappa_constants(1.0).unwrap();
    let ln2 = 2f64.ln();
    let ok_one = (one.alpha - 2.0).abs() <= 1e-14
        && (one.e - (0.5 - 0.5 * ln2)).abs() <= 1e-14
        && (one.d - (1.5 - 1.5 * ln2)).abs() <= 1e-14
        && (one.x_closed - stiff_closed_form()).abs() <= 1e-14;

    check(
        ok_nonrel && ok_stiff && ok_rad && ok_one,
        format!(
            "nonrel X = {:.10} (H^-1 diff {:.1e}); stiff X = {:.10} < 0.7 (H^-1 diff {:.1e}); \
             kappa=1/3 printed form {:.10} < 0.622, 1/alpha - 25/42 = {:.1e} [corrected bound {:.10}]; \
             kappa=1: alpha={}, E,D exact",
            nonrel_formula,
            (nonrel.x_numeric - nonrel_formula).abs(),
            stiff_closed_form(),
            (stiff.x_numeric - stiff_closed_form()).abs(),
            rad.printed.x_closed,
            inv_alpha - 25.0 / 42.0,
            rad.x_closed,
            one.alpha,
        ),
    )
}

fn heteroclinic_numerics() -> Outcome {
    let cfg = IntegratorConfig::default();
    let stiff_m = make_model(ModelSpec::stiff()).unwrap();
    let nonrel_m = make_model(ModelSpec::nonrelativistic()).unwrap();
    let (stiff, nonrel) = match (
        shoot_heteroclinic(&stiff_m, &cfg),
        shoot_heteroclinic(&nonrel_m, &cfg),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return check(false, format!("shoot failed: {e}")),
    };
    let end = |t: &compactness::trajectory::Trajectory, z: f64| {
        let s = t.last().unwrap();
        (s.x - z).hypot(s.y - z)
    };
    let stiff_end = end(&stiff, 0.5);
    let nonrel_end = end(&nonrel, 2.0);
    let mono = verify_lyapunov_monotone(&stiff)
        .unwrap()
        .max(verify_lyapunov_monotone(&nonrel).unwrap());
    let pass = stiff.converged
        && nonrel.converged
        && stiff_end < 1e-6
        && nonrel_end < 1e-6
        && (0.53..=0.57).contains(&stiff.max_x)
        && stiff.max_x < stiff_closed_form()
        && nonrel.max_x < 3.89875
        && mono <= 1e-9;
    check(
        pass,
        format!(
            "stiff max_x = {:.6} in [0.53,0.57] < {:.6}; nonrel max_x = {:.6} < 3.89875; \
             end distances {stiff_end:.1e}/{nonrel_end:.1e}; max V increase {mono:.1e}",
            stiff.max_x,
            stiff_closed_form(),
            nonrel.max_x
        ),
    )
}

fn trap_region() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for m in families() {
        match check_trap_region(&m, 1000) {
            Ok(r) => {
                pass &= r.line_check <= 0.0 || r.line_check.abs() < 1e-12;
                pass &= r.diagonal_check >= -1e-12 && r.isocline_monotone != Some(false);
                parts.push(format!(
                    "{:?}: line {:.1e}, diag {:.1e}, isocline {}",
                    m.family(),
                    r.line_check,
                    r.diagonal_check,
                    r.isocline_monotone
                        .map_or("n/a".to_string(), |b| b.to_string())
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{:?}: {e}", m.family()));
            }
        }
    }
    check(pass, parts.join("; "))
}

fn lambert_suite() -> Outcome {
    let inv_e = (-1f64).exp();
    let mut rng = StdRng::seed_from_u64(0x1a3b);
    let mut worst: f64 = 0.0;
    let mut near = 0usize;
    for branch in [Branch::Principal, Branch::MinusOne] {
        for k in 0..10_000 {
            let x = if k % 5 == 0 {
                near += 1;
                -inv_e + rng.gen_range(0.0..1e-6)
            } else {
                match branch {
                    Branch::Principal => -inv_e + (1e3 + inv_e) * rng.gen::<f64>().powi(4),
                    Branch::MinusOne => -inv_e + (inv_e - 1e-3) * rng.gen::<f64>(),
                }
            };
            if x == 0.0 {
                continue;
            }
            let w = match lambert_w(branch, x) {
                Ok(w) => w,
                Err(e) => return check(false, format!("{e}")),
            };
            worst = worst.max(rel(w * w.exp(), x));
        }
    }
    check(
        worst <= 1e-14,
        format!(
            "max round-trip rel err = {worst:.2e} over 2x10^4 points ({near} within 1e-6 of -1/e)"
        ),
    )
}

fn mass_table() -> Outcome {
    let table = match mass_radius_table() {
        Ok(t) => t,
        Err(e) => return check(false, format!("{e}")),
    };
    let stiff_m = make_model(ModelSpec::stiff()).unwrap();
    let stiff_orbit = shoot_heteroclinic(&stiff_m, &IntegratorConfig::default()).unwrap();
    let rad = kappa_constants(1.0 / 3.0).unwrap();
    let rad_numeric = bound_x(&make_model(ModelSpec::kappa(1.0 / 3.0)).unwrap())
        .unwrap()
        .x_numeric;
    let r = &table.rows;
    let pass = table.schema == 1
        && r.len() == 5
        && r[0].provenance == Provenance::Literature
        && r[1].provenance == Provenance::Literature
        && r[0].expression == "8/9"
        && r[1].expression == "12*sqrt(2) - 16"
        && format!("{:.4}", r[0].value) == "0.8889"
        && format!("{:.4}", r[1].value) == "0.9706"
        && r[2].value == stiff_closed_form()
        && r[3].value == rad_numeric
        && r[3].printed_closed_form == Some(rad.printed.x_closed)
        && r[4].value == stiff_orbit.max_x
        && r[2..]
            .iter()
            .all(|row| row.provenance == Provenance::Computed);
    check(
        pass,
        format!(
            "{} rows; literature {:.4}, {:.4}; computed {:.6}, {:.6} (printed form {:.6}), {:.6}",
            r.len(),
            r[0].value,
            r[1].value,
            r[2].value,
            r[3].value,
            rad.printed.x_closed,
            r[4].value
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 7] = [
        (
            "1 lyapunov decrease",
            lyapunov_decrease,
            Duration::from_secs(1),
        ),
        (
            "2 stability identities",
            stability_identities,
            Duration::from_secs(1),
        ),
        (
            "3 bound reproduction",
            bound_reproduction,
            Duration::from_secs(1),
        ),
        (
            "4 heteroclinic numerics",
            heteroclinic_numerics,
            Duration::from_secs(10),
        ),
        ("5 trap region", trap_region, Duration::from_secs(1)),
        ("6 lambert w", lambert_suite, Duration::from_secs(1)),
        ("7 mass-radius table", mass_table, Duration::from_secs(1)),
    ];
    let mut failures = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed < budget;
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.3} s, budget {} s]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 7 criteria passed", 7 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
