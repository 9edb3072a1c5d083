use complab_core::numeric::linspace;
use complab_core::realfn::{
    counterexample_psi, dini, is_decreasing_dini, quotient_monotone, right_derivative_profile, support_sense_jacobi,
};
use complab_core::{Curvature64, DiniSide, FunctionSpec64, HSchedule, Tolerance};
use proptest::prelude::*;

fn k(v: f64) -> Curvature64 {
    Curvature64::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dini_matches_known_derivative(a in -2.0f64..2.0, b in 0.2f64..3.0, t in 0.1f64..2.9) {
        let f = FunctionSpec64::closed_form("trig", 3.0, move |x| a * (b * x).sin() + x * x)
            .unwrap()
            .with_derivative(move |x| a * b * (b * x).cos() + 2.0 * x);
        let exact = f.derivative(t).unwrap();
        let s = HSchedule::dini_default(3.0);
        for side in [DiniSide::UpperRight, DiniSide::LowerRight] {
            let d = dini(&f, t, side, &s).unwrap();
            prop_assert!((d.value - exact).abs() < 1e-5);
        }
    }

    #[test]
    fn dini_monotonicity_agrees_with_grid_comparison(c in -1.0f64..1.0, w in 1.0f64..6.0) {
        // monotone iff c ≥ 0 for slope c + 0.3 sin(w t)… decided on the grid
        let f = FunctionSpec64::closed_form("g", 2.0, move |t| -(c * t + 0.3 * (w * t).cos() / w)).unwrap();
        let grid = linspace(0.0, 2.0, 2001);
        let tol = Tolerance::default();
        let pairwise = grid.windows(2).all(|p| f.eval(p[0]) >= f.eval(p[1]) - 1e-8);
        let dini_ok = is_decreasing_dini(&f, &grid, tol).passed();
        // the two tests only disagree when the extreme slope is within noise of zero
        let slope_min = c - 0.3;
        if slope_min.abs() > 1e-3 {
            prop_assert_eq!(pairwise, dini_ok);
        }
    }
}

#[test]
fn model_quotients_follow_curvature_order() {
    let ks = [-1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
    for &kb in &ks {
        for &kv in &ks {
            if kb == kv {
                continue;
            }
            let l = 0.95 * k(kb).max_radius().min(k(kv).max_radius()).min(3.0);
            let f = FunctionSpec64::model(k(kb), l).unwrap();
            let grid = linspace(0.01, l, 200);
            let passed = quotient_monotone(&f, k(kv), &grid, Tolerance::absolute(0.0)).passed();
            assert_eq!(passed, kb > kv, "k̄={kb} k={kv}");
        }
    }
}

#[test]
fn right_derivative_of_concave_function_is_nonincreasing() {
    for f in [
        FunctionSpec64::closed_form("sin", 3.0, f64::sin).unwrap(),
        FunctionSpec64::closed_form("min", 2.0, |t| t.min(1.0 + 0.2 * (t - 1.0))).unwrap(),
        FunctionSpec64::closed_form("log", 2.0, |t| (1.0 + t).ln()).unwrap(),
    ] {
        let grid = linspace(0.0, f.end(), 101);
        let d = right_derivative_profile(&f, &grid, &HSchedule::dini_default(f.span())).unwrap();
        // estimate noise of a few 1e−9 between neighbours becomes slope noise over a 0.02 spacing
        let r = is_decreasing_dini(&d, &grid, Tolerance::absolute(1e-6));
        assert!(r.passed(), "{}: {:?}", f.name(), r.failures().collect::<Vec<_>>());
    }
}

#[test]
fn psi_is_concave_but_not_monotone() {
    let psi = counterexample_psi::<f64>();
    let pi = std::f64::consts::PI;
    let interior = linspace(0.01, pi - 0.01, 300);
    let r = support_sense_jacobi(
        &psi,
        k(1.0),
        &interior,
        &HSchedule::second_order(pi),
        Tolerance::default(),
    );
    assert!(
        r.passed(),
        "{:?}",
        r.failures()
            .map(|c| (c.max_violation, c.witness, c.resolution))
            .collect::<Vec<_>>()
    );
    let gap = psi.derive("gap", |t, f| f - t.sin());
    assert!(!is_decreasing_dini(&gap, &linspace(0.0, pi, 300), Tolerance::default()).passed());
    assert!((gap.eval(pi) - gap.eval(0.75 * pi) - (2f64.sqrt() - 1.0)).abs() < 1e-12);
}
