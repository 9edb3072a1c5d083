//! The matching radius `x(r)` defined by `∫₀ˣ fᵐ = ∫₀ʳ sn_kᵐ` and the
//! comparison statements it satisfies.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modelfn::Curvature;
use crate::numeric::{bracketed_root, integrate, linspace, logspace, QuadOptions, RootOptions};
use crate::realfn::{admissibility_check, dini_fitted, DiniSide, FunctionSpec, HSchedule};
use crate::report::{CheckBuilder, Tolerance, VerificationReport};
use crate::Scalar;

const ADMISSIBILITY_GRID: usize = 257;

/// `∫₀ˣ fᵐ` by adaptive quadrature.
pub fn power_integral<T: Scalar>(f: &FunctionSpec<T>, m: u32, x: T) -> Result<T> {
    let x = clamp_into(f, x)?;
    Ok(integrate(
        |t| f.eval(t).powi(m as i32),
        f.start(),
        x,
        &QuadOptions::precise(),
    ))
}

fn clamp_into<T: Scalar>(f: &FunctionSpec<T>, x: T) -> Result<T> {
    let guard = T::lit(1e-12) * f.span();
    if x >= f.start() && x <= f.end() {
        Ok(x)
    } else if x > f.end() && x - f.end() <= guard {
        Ok(f.end())
    } else {
        f.try_eval(x).map(|_| x)
    }
}

/// An admissible `f` together with the exponent, comparison curvature and
/// the bound `t₀` on the image of `x`.
#[derive(Debug, Clone)]
pub struct MatchingProblem<T: Scalar> {
    f: FunctionSpec<T>,
    power: u32,
    k: Curvature<T>,
    bound: T,
    cap: T,
    feasible_radius: T,
    admissibility: VerificationReport,
}

impl<T: Scalar> MatchingProblem<T> {
    pub fn new(f: FunctionSpec<T>, m: u32, k: Curvature<T>, t0: T) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("exponent m must be a positive integer".into()));
        }
        if !(t0 > f.start() && t0 <= f.end()) {
            return Err(Error::domain(
                "t0",
                t0.as_f64(),
                format!("({}, {}]", f.start().as_f64(), f.end().as_f64()),
            ));
        }
        if !(f.eval(t0) > T::zero()) {
            return Err(Error::Hypothesis(format!(
                "f(t0) = {} must be positive",
                f.eval(t0).as_f64()
            )));
        }
        if f.end() >= k.max_radius() {
            return Err(Error::domain(
                "l",
                f.end().as_f64(),
                format!("[0, {}) for k > 0", k.max_radius().as_f64()),
            ));
        }
        let grid = linspace(f.start(), f.end(), ADMISSIBILITY_GRID);
        let admissibility = admissibility_check(&f, k, &grid, Tolerance::default());
        let cap = power_integral(&f, m, t0)?;
        let feasible_radius = feasible_radius(k, m, cap)?;
        Ok(MatchingProblem {
            f,
            power: m,
            k,
            bound: t0,
            cap,
            feasible_radius,
            admissibility,
        })
    }

    /// `t₀ = l`.
    pub fn on_domain(f: FunctionSpec<T>, m: u32, k: Curvature<T>) -> Result<Self> {
        let l = f.end();
        Self::new(f, m, k, l)
    }

    pub fn function(&self) -> &FunctionSpec<T> {
        &self.f
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn curvature(&self) -> Curvature<T> {
        self.k
    }

    pub fn bound(&self) -> T {
        self.bound
    }

    /// Largest radius whose model integral is attainable.
    pub fn feasible_radius(&self) -> T {
        self.feasible_radius
    }

    pub fn admissibility(&self) -> &VerificationReport {
        &self.admissibility
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility.passed()
    }

    fn model_integral(&self, a: T, b: T) -> T {
        let (k, m) = (self.k, self.power as i32);
        integrate(|t| k.sn_raw(t).powi(m), a, b, &QuadOptions::precise())
    }

    // ∫ₐᵇ (fᵐ − sn_kᵐ), exactly zero when f is sn_k
    fn deficit(&self, r: T) -> T {
        let (k, m, f) = (self.k, self.power as i32, &self.f);
        integrate(
            |t| f.eval(t).powi(m) - k.sn_raw(t).powi(m),
            f.start(),
            r,
            &QuadOptions::precise(),
        )
    }

    fn tail_integral(&self, a: T, b: T) -> T {
        let (m, f) = (self.power as i32, &self.f);
        integrate(|t| f.eval(t).powi(m), a, b, &QuadOptions::precise())
    }

    /// Default grid: 64 log-spaced radii in `[1e−3·R, 0.999·R]`.
    pub fn default_grid(&self) -> Vec<T> {
        let r = self.feasible_radius;
        logspace(T::lit(1e-3) * r, T::lit(0.999) * r, 64)
    }
}

fn feasible_radius<T: Scalar>(k: Curvature<T>, m: u32, cap: T) -> Result<T> {
    let opts = QuadOptions::precise();
    let integral = |r: T| integrate(|t| k.sn_raw(t).powi(m as i32), T::zero(), r, &opts);
    let mut hi = k.max_radius();
    if hi.is_finite() {
        if integral(hi) <= cap {
            return Ok(hi);
        }
    } else {
        hi = T::one();
        while integral(hi) < cap {
            hi = hi * T::lit(2.0);
            if !hi.is_finite() {
                return Err(Error::NoSolution(
                    "model integral never reaches the attainable cap".into(),
                ));
            }
        }
    }
    let root = bracketed_root(
        |r| integral(r) - cap,
        T::zero(),
        hi,
        &RootOptions::relative(hi, T::zero()),
    )?;
    Ok(root.x)
}

/// Solution of the matching equation at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingPoint<T> {
    pub r: T,
    pub x: T,
    /// `|∫₀ˣ fᵐ − ∫₀ʳ sn_kᵐ|` evaluated directly.
    pub residual: T,
    /// `sn_kᵐ(r)/fᵐ(x)`, +∞ where `f(x) = 0`.
    pub x_prime: T,
    pub fx: T,
    /// Upper right and upper left Dini derivatives of `f` at `x`.
    pub dini_right: Option<T>,
    pub dini_left: Option<T>,
    pub dini_resolution: T,
}

/// Solves for `x(r)` on the bracket `[r, t₀]`.
pub fn solve_x<T: Scalar>(p: &MatchingProblem<T>, r: T) -> Result<MatchingPoint<T>> {
    let x = solve_root(p, r)?;
    let (k, m) = (p.k, p.power as i32);
    let target = p.model_integral(T::zero(), r);
    let residual = (power_integral(&p.f, p.power, x)? - target).abs();
    let fx = p.f.eval(x);
    let x_prime = if r == T::zero() {
        T::one()
    } else if fx == T::zero() {
        T::infinity()
    } else {
        (k.sn_raw(r) / fx).powi(m)
    };
    let base = HSchedule::dini_default(p.f.span());
    let right = dini_fitted(&p.f, x, DiniSide::UpperRight, &base);
    let left = dini_fitted(&p.f, x, DiniSide::UpperLeft, &base);
    let dini_resolution = [&right, &left]
        .iter()
        .filter_map(|d| d.as_ref().map(|d| d.resolution))
        .fold(T::zero(), T::max);
    Ok(MatchingPoint {
        r,
        x,
        residual,
        x_prime,
        fx,
        dini_right: right.map(|d| d.value),
        dini_left: left.map(|d| d.value),
        dini_resolution,
    })
}

fn solve_root<T: Scalar>(p: &MatchingProblem<T>, r: T) -> Result<T> {
    let r = p.k.domain().admit("r", r)?;
    if p.k.value() > T::zero() && r >= p.k.max_radius() {
        return Err(Error::domain(
            "r",
            r.as_f64(),
            format!("[0, {})", p.k.max_radius().as_f64()),
        ));
    }
    let target = p.model_integral(T::zero(), r);
    let slack = T::lit(1e-13) * (T::one() + p.cap);
    if target > p.cap + slack || r > p.f.end() && target > p.cap {
        return Err(Error::InfeasibleRadius {
            radius: r.as_f64(),
            target: target.as_f64(),
            attainable: p.cap.as_f64(),
        });
    }
    if r == T::zero() {
        return Ok(p.f.start());
    }
    let t0 = p.bound;
    let anchor = r.min(t0);
    // G(x) = ∫₀ʳ(fᵐ − snᵐ) + ∫ᵣˣ fᵐ, split so that f = sn_k gives G(r) = 0 exactly
    let base = if anchor == r {
        p.deficit(r)
    } else {
        p.deficit(anchor) - p.model_integral(anchor, r)
    };
    let g = |x: T| base + p.tail_integral(anchor, x);
    let g_anchor = base;
    if g_anchor == T::zero() {
        return Ok(anchor);
    }
    let (lo, hi) = if g_anchor < T::zero() {
        (anchor, t0)
    } else {
        (p.f.start(), anchor)
    };
    if g_anchor < T::zero() && g(t0) < T::zero() {
        if -g(t0) <= slack {
            return Ok(t0);
        }
        return Err(Error::InfeasibleRadius {
            radius: r.as_f64(),
            target: target.as_f64(),
            attainable: p.cap.as_f64(),
        });
    }
    let root = bracketed_root(g, lo, hi, &RootOptions::relative(t0, T::zero()))?;
    Ok(root.x)
}

/// `x(r)` sampled along an increasing grid.
#[derive(Debug, Clone)]
pub struct MatchingCurve<T: Scalar> {
    pub problem: MatchingProblem<T>,
    pub points: Vec<MatchingPoint<T>>,
}

pub fn matching_curve<T: Scalar>(p: &MatchingProblem<T>, r_grid: &[T]) -> Result<MatchingCurve<T>> {
    if r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("r-grid must be strictly increasing".into()));
    }
    let points = r_grid.par_iter().map(|&r| solve_x(p, r)).collect::<Result<Vec<_>>>()?;
    Ok(MatchingCurve {
        problem: p.clone(),
        points,
    })
}

impl<T: Scalar> MatchingCurve<T> {
    /// Columns `r, x, x_prime, fx, residual`.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["r", "x", "x_prime", "fx", "residual"])?;
        for p in &self.points {
            out.write_record([p.r, p.x, p.x_prime, p.fx, p.residual].map(|v| format!("{:?}", v.as_f64())))?;
        }
        out.flush()
    }
}

// central difference of x(r) with one Richardson step, and its error estimate
fn slope_by_differences<T: Scalar>(p: &MatchingProblem<T>, r: T) -> Result<(T, T)> {
    let big_r = p.feasible_radius;
    let delta = (r / T::lit(2.0))
        .min((big_r - r) / T::lit(4.0))
        .min(T::lit(2e-3) * (T::one() + big_r));
    let central = |d: T| -> Result<T> { Ok((solve_root(p, r + d)? - solve_root(p, r - d)?) / (d + d)) };
    let coarse = central(delta)?;
    let fine = central(delta / T::lit(2.0))?;
    let three = T::lit(3.0);
    Ok((fine + (fine - coarse) / three, (fine - coarse).abs() / three))
}

fn f64s<T: Scalar>(v: T) -> f64 {
    v.as_f64()
}

/// Checks `x ≥ r`, `f(x) ≤ sn_k(r)`, `D^±f(x) ≤ sn′_k(r)`, `x′₊ ≥ 1`, and
/// that `x′₊` agrees with finite differences of `x(r)`.
pub fn verify_matching<T: Scalar>(p: &MatchingProblem<T>, r_grid: &[T], tol: Tolerance) -> Result<VerificationReport> {
    let curve = matching_curve(p, r_grid)?;
    let k = p.k;
    let fd: Vec<Result<(T, T)>> = curve
        .points
        .par_iter()
        .map(|pt| {
            if pt.r > T::zero() && pt.r < p.feasible_radius && pt.x_prime.is_finite() {
                slope_by_differences(p, pt.r)
            } else {
                Ok((T::nan(), T::zero()))
            }
        })
        .collect();
    let mut report = VerificationReport::new("matching");
    let mut ge = CheckBuilder::new("x-at-least-r", "lemma21:x-ge-r", tol);
    let mut fx = CheckBuilder::new("fx-at-most-sn", "lemma21:fx-le-sn", tol);
    let mut dd = CheckBuilder::new("dini-at-most-csn", "lemma21:dini-le-csn", tol);
    let mut sl = CheckBuilder::new("slope-at-least-one", "lemma21:slope-ge-one", tol);
    let mut ch = CheckBuilder::new("slope-matches-differences", "lemma21:slope-formula", tol.scaled(10.0));
    let mut max_residual = T::zero();
    for (pt, fd) in curve.points.iter().zip(fd) {
        let r = f64s(pt.r);
        max_residual = max_residual.max(pt.residual);
        ge.compare(r, r, f64s(pt.x), 0.0);
        fx.compare(r, f64s(pt.fx), f64s(k.sn_raw(pt.r)), 0.0);
        let d = [pt.dini_right, pt.dini_left]
            .into_iter()
            .flatten()
            .fold(T::neg_infinity(), T::max);
        if d > T::neg_infinity() {
            dd.compare(r, f64s(d), f64s(k.csn_raw(pt.r)), f64s(pt.dini_resolution));
        }
        sl.compare(r, 1.0, f64s(pt.x_prime), 0.0);
        let (slope, err) = fd?;
        if slope.is_finite() {
            ch.compare(r, f64s((slope - pt.x_prime).abs()), 0.0, f64s(err));
        }
    }
    for b in [ge, fx, dd, sl, ch] {
        report.push(b.finish());
    }
    report.value("max-residual", f64s(max_residual));
    report.value("feasible-radius", f64s(p.feasible_radius));
    Ok(report)
}

/// Whether both ratios are guaranteed monotone: `k ≥ 0`, or `f = sn_k̄` with
/// `k̄ > k`.
pub fn ratios_guaranteed<T: Scalar>(p: &MatchingProblem<T>) -> bool {
    p.k.value() >= T::zero() || p.f.model_curvature().is_some_and(|kb| kb > p.k.value())
}

/// `f(x)/sn_k(r)` and `r/x` are at most one and nonincreasing in `r`.
pub fn ratio_monotonicity_curve<T: Scalar>(
    p: &MatchingProblem<T>,
    r_grid: &[T],
    tol: Tolerance,
) -> Result<VerificationReport> {
    let curve = matching_curve(p, r_grid)?;
    let applicable = ratios_guaranteed(p);
    let mut report = VerificationReport::new("matching-ratios");
    if !applicable {
        report.warn("outside the guaranteed regime (k < 0 and f is not a model with larger curvature); failures are expected to be possible");
    }
    let pts: Vec<(f64, f64, f64)> = curve
        .points
        .iter()
        .filter(|pt| pt.r > T::zero() && pt.x > T::zero() && pt.x_prime.is_finite())
        .map(|pt| (f64s(pt.r), f64s(pt.fx / p.k.sn_raw(pt.r)), f64s(pt.r / pt.x)))
        .collect();
    let mut a1 = CheckBuilder::new("fx-ratio-at-most-one", "corollary27:fx-ratio-le-one", tol);
    let mut a2 = CheckBuilder::new("r-over-x-at-most-one", "corollary27:r-over-x-le-one", tol);
    for &(r, q, s) in &pts {
        a1.compare(r, q, 1.0, 0.0);
        a2.compare(r, s, 1.0, 0.0);
    }
    let mut m1 =
        CheckBuilder::new("fx-ratio-nonincreasing", "corollary27:fx-ratio-decreasing", tol).applicable(applicable);
    let mut m2 =
        CheckBuilder::new("r-over-x-nonincreasing", "corollary27:r-over-x-decreasing", tol).applicable(applicable);
    for w in pts.windows(2) {
        m1.compare(w[1].0, w[1].1, w[0].1, 0.0);
        m2.compare(w[1].0, w[1].2, w[0].2, 0.0);
    }
    for b in [a1, a2, m1, m2] {
        report.push(b.finish());
    }
    report.value("applicable", if applicable { 1.0 } else { 0.0 });
    Ok(report)
}

/// `(x, r)` pairs from matching `f = sn_k̄` against `k = −1`.
pub fn hyperbolic_pairs<T: Scalar>(kbar: T, m: u32, radii: &[T]) -> Result<Vec<(T, T)>> {
    let kb = Curvature::new(kbar)?;
    let k = Curvature::new(-T::one())?;
    let rmax = radii.iter().copied().fold(T::zero(), T::max);
    let mut l = rmax + T::one();
    let need = |l: T| {
        let opts = QuadOptions::precise();
        integrate(|t| kb.sn_raw(t).powi(m as i32), T::zero(), l, &opts)
            >= integrate(|t| k.sn_raw(t).powi(m as i32), T::zero(), rmax, &opts)
    };
    while !need(l) {
        l = l * T::lit(2.0);
    }
    let p = MatchingProblem::on_domain(FunctionSpec::model(kb, l)?, m, k)?;
    radii.iter().map(|&r| solve_x(&p, r).map(|pt| (pt.x, r))).collect()
}

/// For `k̄ ∈ (−1, 0)` and pairs from [`hyperbolic_pairs`]:
/// `sn_k̄ᵐ(x) > √(−k̄)·sinhᵐ(r)` and `√(−k̄)·x < r`.
pub fn hyperbolic_margin_check<T: Scalar>(kbar: T, m: u32, pairs: &[(T, T)]) -> Result<VerificationReport> {
    if !(kbar > -T::one() && kbar < T::zero()) {
        return Err(Error::domain("kbar", kbar.as_f64(), "(-1, 0)"));
    }
    let kb = Curvature::new(kbar)?;
    let s = (-kbar).sqrt();
    let tol = Tolerance::absolute(0.0);
    let mut a = CheckBuilder::new("scaled-sinh-below-model", "hyperbolic-margin:power", tol).strict();
    let mut b = CheckBuilder::new("scaled-x-below-r", "hyperbolic-margin:radius", tol).strict();
    let mut min_margin = f64::INFINITY;
    for &(x, r) in pairs {
        let lhs = s * r.sinh().powi(m as i32);
        let rhs = kb.sn_raw(x).powi(m as i32);
        min_margin = min_margin.min(f64s(rhs - lhs));
        a.compare(f64s(r), f64s(lhs), f64s(rhs), 0.0);
        b.compare(f64s(r), f64s(s * x), f64s(r), 0.0);
    }
    let mut report = VerificationReport::new("hyperbolic-margin");
    report.push(a.finish());
    report.push(b.finish());
    report.value("min-margin", min_margin);
    Ok(report)
}

/// Solution of `f″ − f = cos t − 1`, `f(0) = 0`, `f′(0) = 1` on `[0, 5]`.
pub fn counterexample_sinh<T: Scalar>() -> FunctionSpec<T> {
    let half = T::lit(0.5);
    FunctionSpec::closed_form("sinh-counterexample", T::lit(5.0), move |t| {
        half * t.sinh() - half * (-t).exp() - half * t.cos() + T::one()
    })
    .expect("[0, 5] is a valid domain")
    .with_derivative(move |t| half * t.cosh() + half * (-t).exp() + half * t.sin())
}
