//! Seeded draws of admissible functions and hinges.

use std::f64::consts::PI;

use complab_core::realfn::admissibility_check;
use complab_core::{Curvature64, FunctionSpec64, Hinge64, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliResult;

const MAX_ATTEMPTS: usize = 64;
const CHECK_POINTS: usize = 257;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A drawn function together with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct Draw {
    pub kbar: f64,
    pub bend: f64,
    pub f: FunctionSpec64,
}

fn end_for(k: f64, kbar: f64) -> f64 {
    let cap = |c: f64| if c > 0.0 { 0.9 * PI / c.sqrt() } else { f64::INFINITY };
    cap(k).min(cap(kbar)).min(2.0)
}

/// `sn_k̄(t) − c·t³` with `k̄ ≥ k` and a small cubic bend, kept only when it
/// passes the admissibility checks against `k`.
pub fn admissible_function(rng: &mut ChaCha8Rng, k: Curvature64, tol: Tolerance) -> CliResult<Option<Draw>> {
    let kv = k.value();
    for _ in 0..MAX_ATTEMPTS {
        let kbar = kv + rng.gen_range(0.0..1.5);
        let l = end_for(kv, kbar);
        let bend = rng.gen_range(0.0..0.05) / l;
        let c = Curvature64::new(kbar)?;
        let f = FunctionSpec64::closed_form(format!("sn:{kbar:.6}-bend:{bend:.6}"), l, move |t| {
            c.sn_raw(t) - bend * t * t * t
        })?
        .with_derivative(move |t| c.csn_raw(t) - 3.0 * bend * t * t);
        let grid = complab_core::numeric::linspace(0.0, l, CHECK_POINTS);
        if admissibility_check(&f, k, &grid, tol).passed() {
            return Ok(Some(Draw { kbar, bend, f }));
        }
    }
    Ok(None)
}

fn side_bound(kv: f64) -> f64 {
    if kv > 0.0 {
        0.95 * PI / kv.sqrt()
    } else {
        3.0
    }
}

/// Hinge with sides and angle drawn uniformly within both curvature domains.
pub fn hinge(rng: &mut ChaCha8Rng, k: Curvature64, kbar: Curvature64) -> CliResult<Hinge64> {
    let top = side_bound(k.value()).min(side_bound(kbar.value()));
    let a = rng.gen_range(0.05..top);
    let l = rng.gen_range(0.05..top);
    let theta = rng.gen_range(0.0..PI);
    Ok(Hinge64::new(a, theta, l, k, kbar)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_admissible() {
        let k = Curvature64::new(-1.0).unwrap();
        let tol = Tolerance::default();
        let a = admissible_function(&mut rng(3), k, tol).unwrap().unwrap();
        let b = admissible_function(&mut rng(3), k, tol).unwrap().unwrap();
        assert_eq!(a.kbar, b.kbar);
        assert_eq!(a.bend, b.bend);
        assert!(a.kbar >= -1.0);
        assert_eq!(a.f.eval(0.7), b.f.eval(0.7));
    }

    #[test]
    fn hinges_fit_both_domains() {
        let mut r = rng(5);
        let (k, kb) = (Curvature64::new(1.0).unwrap(), Curvature64::new(2.0).unwrap());
        for _ in 0..50 {
            let h = hinge(&mut r, k, kb).unwrap();
            assert!(h.a < side_bound(2.0) && h.l < side_bound(2.0));
        }
    }
}
