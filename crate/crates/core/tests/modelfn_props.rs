use complab_core::modelfn::{ball_volume_with, sphere_area};
use complab_core::numeric::linspace;
use complab_core::numeric::QuadOptions;
use complab_core::{Curvature64, Dimension};
use proptest::prelude::*;

fn k(v: f64) -> Curvature64 {
    Curvature64::new(v).unwrap()
}

fn domain_top(kv: f64) -> f64 {
    if kv > 0.0 {
        std::f64::consts::PI / kv.sqrt()
    } else {
        2.0
    }
}

#[test]
fn pythagorean_identity_on_grids() {
    for kv in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let c = k(kv);
        for t in linspace(0.0, domain_top(kv), 1000) {
            let (s, cs) = (c.sn(t).unwrap(), c.csn(t).unwrap());
            assert!((cs * cs + kv * s * s - 1.0).abs() < 1e-12, "k={kv} t={t}");
        }
    }
}

#[test]
fn phi_solves_its_equation() {
    let h = 1e-4;
    for kv in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let c = k(kv);
        let top = domain_top(kv);
        for t in linspace(0.01 * top, 0.99 * top, 200) {
            let (a, m, b) = (c.phi(t - h).unwrap(), c.phi(t).unwrap(), c.phi(t + h).unwrap());
            assert!(((b - a) / (2.0 * h) - c.sn(t).unwrap()).abs() < 1e-6);
            assert!(((a + b - 2.0 * m) / (h * h) + kv * m - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn sn_increases_up_to_the_half_radius() {
    for kv in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let c = k(kv);
        let top = if kv > 0.0 { c.half_radius() } else { 6.0 };
        let g = linspace(0.0, top, 500);
        for w in g.windows(2) {
            assert!(c.sn(w[1]).unwrap() > c.sn(w[0]).unwrap());
        }
    }
}

proptest! {
    #[test]
    fn scaling_law(kv in 0.05f64..4.0, frac in 0.0f64..1.0, negative in any::<bool>()) {
        let kv = if negative { -kv } else { kv };
        let t = frac * if kv > 0.0 { std::f64::consts::PI / kv.sqrt() } else { 3.0 };
        let s = kv.abs().sqrt();
        let unit = k(kv.signum());
        prop_assert!((k(kv).sn(t).unwrap() - unit.sn(s * t).unwrap() / s).abs() < 1e-12);
    }

    #[test]
    fn ball_volume_derivative_is_sphere_area(kv in -2.0f64..2.0, n in 2u32..6, frac in 0.05f64..0.95) {
        let c = k(kv);
        let dim = Dimension::new(n).unwrap();
        let r = frac * domain_top(kv).min(4.0);
        let h = 1e-4;
        let q = QuadOptions::precise();
        let fd = (ball_volume_with(c, dim, r + h, &q).unwrap() - ball_volume_with(c, dim, r - h, &q).unwrap()) / (2.0 * h);
        let exact = sphere_area(c, dim, r).unwrap();
        // central-difference truncation is h²/6 times the second derivative of the area
        prop_assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0));
    }

    #[test]
    fn sn_is_continuous_across_small_k(t in 0.0f64..3.0, e in 1e-12f64..1e-6) {
        let (a, b) = (k(e).sn(t).unwrap(), k(-e).sn(t).unwrap());
        prop_assert!((a - b).abs() < 1e-5);
        prop_assert!((a - t).abs() < 1e-5);
    }
}
