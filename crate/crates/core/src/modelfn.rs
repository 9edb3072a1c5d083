//! Special functions of the simply connected space form of curvature `k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{integrate, QuadOptions};
use crate::Scalar;

// below this |k| the k = 0 branch plus a first-order correction is used
const FLAT_BAND: f64 = 1e-9;
// relative clamp width at the k > 0 boundary
const GUARD: f64 = 1e-12;

/// Curvature of a comparison space form.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Curvature<T>(T);

impl<T: Scalar> Curvature<T> {
    pub fn new(k: T) -> Result<Self> {
        if k.is_finite() {
            Ok(Curvature(k))
        } else {
            Err(Error::domain("k", k.as_f64(), "finite reals"))
        }
    }

    pub fn value(self) -> T {
        self.0
    }

    fn is_flat(self) -> bool {
        self.0.abs() < T::lit(FLAT_BAND)
    }

    /// π/√k for k > 0, +∞ otherwise.
    pub fn max_radius(self) -> T {
        if self.0 > T::zero() && !self.is_flat() {
            T::PI() / self.0.sqrt()
        } else {
            T::infinity()
        }
    }

    /// π/(2√k) for k > 0, +∞ otherwise.
    pub fn half_radius(self) -> T {
        self.max_radius() / T::lit(2.0)
    }

    pub fn domain(self) -> ModelDomain<T> {
        ModelDomain { k: self }
    }

    /// Unchecked three-branch sn_k.
    pub fn sn_raw(self, t: T) -> T {
        let k = self.0;
        if self.is_flat() {
            t - k * t * t * t / T::lit(6.0)
        } else if k > T::zero() {
            let s = k.sqrt();
            (s * t).sin() / s
        } else {
            let s = (-k).sqrt();
            (s * t).sinh() / s
        }
    }

    /// Unchecked derivative of sn_k.
    pub fn csn_raw(self, t: T) -> T {
        let k = self.0;
        if self.is_flat() {
            T::one() - k * t * t / T::lit(2.0)
        } else if k > T::zero() {
            (k.sqrt() * t).cos()
        } else {
            ((-k).sqrt() * t).cosh()
        }
    }

    /// Unchecked φ_k, written with half-angle forms to avoid cancellation.
    pub fn phi_raw(self, rho: T) -> T {
        let k = self.0;
        let two = T::lit(2.0);
        if self.is_flat() {
            rho * rho / two - k * rho.powi(4) / T::lit(24.0)
        } else if k > T::zero() {
            let s = (k.sqrt() * rho / two).sin();
            two * s * s / k
        } else {
            let s = ((-k).sqrt() * rho / two).sinh();
            -two * s * s / k
        }
    }

    pub fn sn(self, t: T) -> Result<T> {
        let t = self.domain().admit("t", t)?;
        if t == self.max_radius() {
            return Ok(T::zero());
        }
        Ok(self.sn_raw(t))
    }

    pub fn csn(self, t: T) -> Result<T> {
        let t = self.domain().admit("t", t)?;
        Ok(self.csn_raw(t))
    }

    pub fn phi(self, rho: T) -> Result<T> {
        if !(rho.is_finite() && rho >= T::zero()) {
            return Err(Error::domain("rho", rho.as_f64(), "[0, inf)"));
        }
        Ok(self.phi_raw(rho))
    }
}

/// Admissible radii `[0, r_max]` of a space form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelDomain<T> {
    k: Curvature<T>,
}

impl<T: Scalar> ModelDomain<T> {
    pub fn r_max(&self) -> T {
        self.k.max_radius()
    }

    pub fn contains(&self, r: T) -> bool {
        self.admit("r", r).is_ok()
    }

    /// Validates `r`, snapping values within the guard band onto `r_max`.
    pub fn admit(&self, what: &'static str, r: T) -> Result<T> {
        let top = self.r_max();
        if !r.is_finite() || r < T::zero() {
            return Err(Error::domain(what, r.as_f64(), format!("[0, {}]", top.as_f64())));
        }
        if r <= top {
            return Ok(r);
        }
        if r - top <= T::lit(GUARD) * top {
            return Ok(top);
        }
        Err(Error::domain(what, r.as_f64(), format!("[0, {}]", top.as_f64())))
    }
}

/// Space dimension n ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub const TWO: Dimension = Dimension(2);

    pub fn new(n: u32) -> Result<Self> {
        if n >= 2 {
            Ok(Dimension(n))
        } else {
            Err(Error::domain("n", n, "integers >= 2"))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

pub fn sn<T: Scalar>(k: Curvature<T>, t: T) -> Result<T> {
    k.sn(t)
}

pub fn csn<T: Scalar>(k: Curvature<T>, t: T) -> Result<T> {
    k.csn(t)
}

pub fn phi<T: Scalar>(k: Curvature<T>, rho: T) -> Result<T> {
    k.phi(rho)
}

/// Volume of the unit (n−1)-sphere, 2π^{n/2}/Γ(n/2).
pub fn unit_sphere_measure<T: Scalar>(n: Dimension) -> T {
    let n = n.get();
    let half = T::lit(0.5);
    // Γ(n/2) by stepping up from Γ(1) = 1 or Γ(1/2) = √π
    let (mut gamma, mut arg) = if n.is_multiple_of(2) {
        (T::one(), T::one())
    } else {
        (T::PI().sqrt(), half)
    };
    let target = T::lit(f64::from(n) / 2.0);
    while arg < target {
        gamma = gamma * arg;
        arg = arg + T::one();
    }
    T::lit(2.0) * T::PI().powf(target) / gamma
}

/// Area of the geodesic sphere of radius `r`, v₁·sn_k^{n−1}(r).
pub fn sphere_area<T: Scalar>(k: Curvature<T>, n: Dimension, r: T) -> Result<T> {
    let s = k.sn(r)?;
    Ok(unit_sphere_measure::<T>(n) * s.powi(n.get() as i32 - 1))
}

/// v₁(n−1)sn_k^{n−2}(r)csn_k(r), the radial derivative of [`sphere_area`].
pub fn sphere_area_slope<T: Scalar>(k: Curvature<T>, n: Dimension, r: T) -> Result<T> {
    let s = k.sn(r)?;
    let c = k.csn(r)?;
    let e = n.get() as i32;
    Ok(unit_sphere_measure::<T>(n) * T::of(e as usize - 1) * s.powi(e - 2) * c)
}

pub fn ball_volume<T: Scalar>(k: Curvature<T>, n: Dimension, r: T) -> Result<T> {
    ball_volume_with(k, n, r, &QuadOptions::default())
}

/// Volume of the geodesic ball of radius `r` under explicit quadrature options.
pub fn ball_volume_with<T: Scalar>(k: Curvature<T>, n: Dimension, r: T, opts: &QuadOptions) -> Result<T> {
    let r = k.domain().admit("r", r)?;
    let v1 = unit_sphere_measure::<T>(n);
    let e = n.get() as i32 - 1;
    Ok(integrate(|t| v1 * k.sn_raw(t).powi(e), T::zero(), r, opts))
}
