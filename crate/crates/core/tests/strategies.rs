//! The parallel and sequential strategies must agree bit for bit.

use compactness::bounds::sweep_kappa;
use compactness::lyapunov::level_set_grid;
use compactness::model::{make_model, ModelSpec};
use compactness::portrait::{default_window, portrait};
use compactness::Strategy;

// Debug formatting compares NaN cells (outside the domain) as equal.
fn same<T: std::fmt::Debug>(a: &T, b: &T) -> bool {
    format!("{a:?}") == format!("{b:?}")
}

#[test]
fn sweep_is_strategy_independent() {
    let seq = sweep_kappa(0.05, 1.0, 64, Strategy::Sequential).unwrap();
    let par = sweep_kappa(0.05, 1.0, 64, Strategy::Parallel).unwrap();
    assert_eq!(seq.len(), 64);
    assert!(same(&seq, &par));
    assert!(seq.windows(2).all(|w| w[1].kappa > w[0].kappa));
}

#[test]
fn grids_are_strategy_independent() {
    for spec in [
        ModelSpec::stiff(),
        ModelSpec::nonrelativistic(),
        ModelSpec::kappa(0.2),
    ] {
        let m = make_model(spec).unwrap();
        let (xr, yr) = default_window(&m);
        let a = level_set_grid(&m, xr, yr, 57, 43, Strategy::Sequential).unwrap();
        let b = level_set_grid(&m, xr, yr, 57, 43, Strategy::Parallel).unwrap();
        assert!(same(&a, &b));
        let p = portrait(&m, xr, yr, 31, 29, Strategy::Sequential).unwrap();
        let q = portrait(&m, xr, yr, 31, 29, Strategy::Parallel).unwrap();
        assert!(same(&p, &q));
        assert_eq!(p.field.len(), 31 * 29);
    }
}
