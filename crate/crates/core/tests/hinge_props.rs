use complab_core::hinge::{cosine_identity_check, hinge_grid, law_of_cosines, relative_toponogov, toponogov_check};
use complab_core::numeric::linspace;
use complab_core::{Curvature64, Hinge64, Status, Tolerance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn k(v: f64) -> Curvature64 {
    Curvature64::new(v).unwrap()
}

fn side_bound(kv: f64) -> f64 {
    if kv > 0.0 {
        0.95 * k(kv).max_radius()
    } else {
        3.0
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn law_of_cosines_shape(kv in -2.0f64..2.0, fa in 0.0f64..1.0, fb in 0.0f64..1.0, g1 in 0.0f64..std::f64::consts::PI, g2 in 0.0f64..std::f64::consts::PI) {
        let c = k(kv);
        let top = side_bound(kv) / 2.0;
        let (a, b) = (fa * top, fb * top);
        let ab = law_of_cosines(c, a, b, g1).unwrap();
        prop_assert!((ab - law_of_cosines(c, b, a, g1).unwrap()).abs() < 1e-12);
        let (lo, hi) = if g1 < g2 { (g1, g2) } else { (g2, g1) };
        prop_assert!(law_of_cosines(c, a, b, lo).unwrap() <= law_of_cosines(c, a, b, hi).unwrap() + 1e-12);
        prop_assert!((law_of_cosines(c, a, b, 0.0).unwrap() - (a - b).abs()).abs() < 1e-7);
        prop_assert!((law_of_cosines(c, a, b, std::f64::consts::PI).unwrap() - (a + b)).abs() < 1e-7);
    }

    #[test]
    fn phi_identity(kv in -2.0f64..2.0, fa in 0.01f64..1.0, t1 in 0.0f64..std::f64::consts::PI, t2 in 0.0f64..std::f64::consts::PI, ft in 0.01f64..1.0) {
        let top = side_bound(kv) / 2.0;
        let r = cosine_identity_check(k(kv), fa * top, t1, t2, &[ft * top], Tolerance::absolute(1e-10)).unwrap();
        prop_assert!(r.passed(), "{}", r.values["max-gap"]);
    }
}

fn random_hinge(rng: &mut ChaCha8Rng, kv: f64, kb: f64) -> Hinge64 {
    let top = side_bound(kv).min(side_bound(kb));
    let a = rng.gen_range(0.05..top);
    let l = rng.gen_range(0.05..top);
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    Hinge64::new(a, theta, l, k(kv), k(kb)).unwrap()
}

#[test]
fn comparison_holds_whenever_actual_curvature_dominates() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kb in [-1.0, 0.0, 1.0] {
        for kv in [-1.0, 0.0, 1.0] {
            for _ in 0..20 {
                let h = random_hinge(&mut rng, kv, kb);
                let r = toponogov_check(&h, &hinge_grid(h.l, 80), Tolerance::default()).unwrap();
                let support = r.check("support-sense").unwrap();
                if kb >= kv {
                    assert!(r.passed(), "{h:?}: {:?}", r.failures().collect::<Vec<_>>());
                    assert_eq!(support.status, Status::Pass);
                } else {
                    assert!(r.checks.iter().all(|c| c.status != Status::Fail));
                }
            }
        }
    }
}

#[test]
fn phi_monotone_and_rigid() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (kb, kv) in [(1.0, 0.0), (0.0, -1.0), (1.0, -1.0), (0.0, 0.0)] {
        for _ in 0..10 {
            let h = random_hinge(&mut rng, kv, kb);
            let bar = rng.gen_range(0.0..std::f64::consts::PI);
            let r = relative_toponogov(&h, bar, &hinge_grid(h.l, 120), Tolerance::default()).unwrap();
            assert!(r.passed(), "{h:?} θ̄={bar}: {:?}", r.failures().collect::<Vec<_>>());
        }
    }
    // equal angle and curvature: Φ vanishes identically, so the rigidity clause is exercised
    let h = Hinge64::new(1.0, 1.0, 2.0, k(0.5), k(0.5)).unwrap();
    let r = relative_toponogov(&h, 1.0, &linspace(0.002, 2.0, 50), Tolerance::default()).unwrap();
    assert_eq!(r.check("phi-rigidity").unwrap().status, Status::Pass);
}
