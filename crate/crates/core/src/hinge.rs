//! Hinges in constant curvature: law of cosines, distance profiles and the
//! comparison functions built from `φ_k` of distances.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modelfn::Curvature;
use crate::numeric::{limit_at_zero, linspace};
use crate::realfn::{dini_fitted, support_sense_check, DiniSide, FunctionSpec, HSchedule};
use crate::report::{Check, CheckBuilder, Status, Tolerance, VerificationReport};
use crate::Scalar;

const ANGLE_GUARD: f64 = 1e-12;
const SMALL_K: f64 = 1e-9;
// quotient points with a denominator below this are skipped
const DENOMINATOR_FLOOR: f64 = 1e-10;

fn check_angle<T: Scalar>(what: &'static str, g: T) -> Result<T> {
    let guard = T::lit(ANGLE_GUARD);
    if g >= -guard && g <= T::PI() + guard {
        Ok(g.max(T::zero()).min(T::PI()))
    } else {
        Err(Error::domain(what, g.as_f64(), "[0, π]"))
    }
}

fn check_side<T: Scalar>(what: &'static str, k: Curvature<T>, s: T) -> Result<T> {
    let top = k.max_radius();
    let guard = if top.is_finite() {
        T::lit(ANGLE_GUARD) * top
    } else {
        T::zero()
    };
    if s >= T::zero() && s <= top + guard {
        Ok(s.min(top))
    } else {
        Err(Error::domain(what, s.as_f64(), format!("[0, {}]", top.as_f64())))
    }
}

// t with φ_k(t) = v
fn phi_inverse<T: Scalar>(k: Curvature<T>, v: T) -> T {
    let v = v.max(T::zero());
    let kv = k.value();
    let two = T::lit(2.0);
    if kv.abs() < T::lit(SMALL_K) {
        (two * v + kv * v * v / T::lit(3.0)).sqrt()
    } else if kv > T::zero() {
        let s = (kv * v / two).sqrt().min(T::one());
        two * s.asin() / kv.sqrt()
    } else {
        two * (-kv * v / two).sqrt().asinh() / (-kv).sqrt()
    }
}

/// Length of the third side opposite the angle `γ` between sides `a`, `b`,
/// from `φ_k(c) = φ_k(|a − b|) + 2 sn_k(a) sn_k(b) sin²(γ/2)`.
pub fn law_of_cosines<T: Scalar>(k: Curvature<T>, a: T, b: T, gamma: T) -> Result<T> {
    let a = check_side("a", k, a)?;
    let b = check_side("b", k, b)?;
    let gamma = check_angle("γ", gamma)?;
    let hav = (gamma / T::lit(2.0)).sin();
    let v = k.phi_raw((a - b).abs()) + T::lit(2.0) * k.sn_raw(a) * k.sn_raw(b) * hav * hav;
    Ok(phi_inverse(k, v))
}

/// Side `a = |pq|`, angle `θ` at `q`, and a geodesic of length `l` from
/// `q`, laid out in the surface of curvature `k̄` and compared against
/// curvature `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hinge<T> {
    pub a: T,
    pub theta: T,
    pub l: T,
    pub k: Curvature<T>,
    pub kbar: Curvature<T>,
}

impl<T: Scalar> Hinge<T> {
    pub fn new(a: T, theta: T, l: T, k: Curvature<T>, kbar: Curvature<T>) -> Result<Self> {
        let theta = check_angle("θ", theta)?;
        for (what, v) in [("a", a), ("l", l)] {
            if !(v > T::zero()) {
                return Err(Error::domain(what, v.as_f64(), "(0, ∞)"));
            }
            for c in [k, kbar] {
                if !(v < c.max_radius()) {
                    return Err(Error::domain(
                        what,
                        v.as_f64(),
                        format!("(0, {})", c.max_radius().as_f64()),
                    ));
                }
            }
        }
        Ok(Hinge { a, theta, l, k, kbar })
    }

    /// `|pγ(t)|` on the `k̄` surface.
    pub fn span(&self, t: T) -> T {
        law_of_cosines(self.kbar, self.a, t, self.theta).expect("hinge sides are in the domain")
    }

    /// `|p̃γ̃(t)|` on the comparison surface.
    pub fn model_span(&self, t: T) -> T {
        law_of_cosines(self.k, self.a, t, self.theta).expect("hinge sides are in the domain")
    }

    /// `f(t) = φ_k(|pγ(t)|) − φ_k(|p̃γ̃(t)|)`.
    pub fn comparison(&self) -> FunctionSpec<T> {
        let h = *self;
        FunctionSpec::closed_form("hinge-comparison", self.l, move |t| {
            h.k.phi_raw(h.span(t)) - h.k.phi_raw(h.model_span(t))
        })
        .expect("l is positive")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceProfile {
    pub curvature: f64,
    pub t: Vec<f64>,
    pub d: Vec<f64>,
}

impl DistanceProfile {
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "d"])?;
        for (t, d) in self.t.iter().zip(&self.d) {
            out.write_record([format!("{t:?}"), format!("{d:?}")])?;
        }
        out.flush()
    }
}

/// Distances from `p` to the points of the geodesic leaving `q` at angle `θ`.
pub fn hinge_profile<T: Scalar>(kbar: Curvature<T>, a: T, theta: T, grid: &[T]) -> Result<DistanceProfile> {
    let d = grid
        .iter()
        .map(|&t| law_of_cosines(kbar, a, t, theta).map(|v| v.as_f64()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DistanceProfile {
        curvature: kbar.value().as_f64(),
        t: grid.iter().map(|t| t.as_f64()).collect(),
        d,
    })
}

fn f64s<T: Scalar>(v: T) -> f64 {
    v.as_f64()
}

fn check_grid<T: Scalar>(l: T, grid: &[T]) -> Result<()> {
    match grid.iter().find(|&&t| !(t > T::zero() && t <= l)) {
        Some(&t) => Err(Error::domain("t", t.as_f64(), format!("(0, {}]", l.as_f64()))),
        None => Ok(()),
    }
}

/// Uniform grid on `[1e−3·l, l]`.
pub fn hinge_grid<T: Scalar>(l: T, count: usize) -> Vec<T> {
    linspace(T::lit(1e-3) * l, l, count)
}

fn relabel(mut c: Check, name: &str, anchor: &str, applicable: bool) -> Check {
    c.name = name.into();
    c.anchor = anchor.into();
    if !applicable && c.status == Status::Fail {
        c.status = Status::ExpectedPossibleFail;
    }
    c
}

/// Span comparison, support-sense concavity of the comparison function,
/// its sign and initial slope, and its monotonicity up to `π/(2√k)`.
pub fn toponogov_check<T: Scalar>(h: &Hinge<T>, grid: &[T], tol: Tolerance) -> Result<VerificationReport> {
    check_grid(h.l, grid)?;
    let applicable = h.kbar.value() >= h.k.value();
    let mut report = VerificationReport::new("toponogov");
    if !applicable {
        report.warn(format!(
            "k̄ = {} is below k = {}; failures are expected to be possible",
            h.kbar.value().as_f64(),
            h.k.value().as_f64()
        ));
    }
    let f = h.comparison();
    let rows: Vec<(T, T, T, T)> = grid
        .par_iter()
        .map(|&t| (t, h.span(t), h.model_span(t), f.eval(t)))
        .collect();

    let mut span = CheckBuilder::new("span-at-most-model", "toponogov:span-le-model", tol).applicable(applicable);
    let mut sign =
        CheckBuilder::new("difference-nonpositive", "toponogov:difference-le-zero", tol).applicable(applicable);
    for &(t, d, dm, ft) in &rows {
        span.compare(f64s(t), f64s(d), f64s(dm), 0.0);
        sign.compare(f64s(t), f64s(ft), 0.0, 0.0);
    }
    report.push(span.finish());

    let interior: Vec<T> = grid.iter().copied().filter(|&t| t < h.l).collect();
    let schedule = HSchedule::second_order(h.l);
    let ss = support_sense_check(&f, h.k, &interior, &schedule, tol);
    report.push(relabel(ss, "support-sense", "toponogov:support-sense", applicable));
    report.push(sign.finish());

    let mut slope =
        CheckBuilder::new("initial-slope-nonpositive", "toponogov:initial-slope", tol).applicable(applicable);
    if let Some(d) = dini_fitted(&f, T::zero(), DiniSide::UpperRight, &HSchedule::dini_default(h.l)) {
        slope.compare(0.0, f64s(d.value), 0.0, f64s(d.resolution));
    }
    report.push(slope.finish());

    if h.k.value() > T::zero() {
        let top = h.k.half_radius();
        let mut mono = CheckBuilder::new("difference-nonincreasing", "toponogov:difference-decreasing", tol)
            .applicable(applicable);
        let early: Vec<&(T, T, T, T)> = rows.iter().filter(|r| r.0 <= top).collect();
        mono.compare(0.0, f64s(early.first().map_or(T::zero(), |r| r.3)), 0.0, 0.0);
        for w in early.windows(2) {
            mono.compare(f64s(w[1].0), f64s(w[1].3), f64s(w[0].3), 0.0);
        }
        report.push(mono.finish());
    }
    Ok(report)
}

/// `Φ(t) = (φ_k(|pγ(t)|) − φ_k(|p̃γ̄(t)|)) / sn_k(t)` with `γ̄` at angle `θ̄`
/// in the comparison surface.
pub fn phi_curve<T: Scalar>(h: &Hinge<T>, theta_bar: T, grid: &[T]) -> Result<Vec<(T, T)>> {
    let theta_bar = check_angle("θ̄", theta_bar)?;
    check_grid(h.l, grid)?;
    Ok(grid
        .par_iter()
        .map(|&t| {
            let bar = law_of_cosines(h.k, h.a, t, theta_bar).expect("hinge sides are in the domain");
            (t, (h.k.phi_raw(h.span(t)) - h.k.phi_raw(bar)) / h.k.sn_raw(t))
        })
        .collect())
}

pub fn write_phi_csv<T: Scalar, W: Write>(curve: &[(T, T)], w: W) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "phi"])?;
    for (t, p) in curve {
        out.write_record([format!("{:?}", t.as_f64()), format!("{:?}", p.as_f64())])?;
    }
    out.flush()
}

// points used for the small-t limit of the angle quotient
const LIMIT_POINTS: usize = 6;

/// Monotonicity of `Φ`, its rigidity clause, and the angle quotient
/// comparing the hinge at `θ` with the comparison hinges at `θ` and `θ̄`.
pub fn relative_toponogov<T: Scalar>(
    h: &Hinge<T>,
    theta_bar: T,
    grid: &[T],
    tol: Tolerance,
) -> Result<VerificationReport> {
    let curve = phi_curve(h, theta_bar, grid)?;
    let applicable = h.kbar.value() >= h.k.value();
    let mut report = VerificationReport::new("relative-toponogov");
    if !applicable {
        report.warn("k̄ is below k; failures are expected to be possible");
    }
    let mut mono =
        CheckBuilder::new("phi-nonincreasing", "relative-toponogov:phi-decreasing", tol).applicable(applicable);
    for w in curve.windows(2) {
        mono.compare(f64s(w[1].0), f64s(w[1].1), f64s(w[0].1), 0.0);
    }
    report.push(mono.finish());

    // Φ(t₁) = Φ(t₂) forces Φ ≡ Φ(t₂) on (0, t₂]
    let flat = T::lit(1e-10);
    let mut rigid = CheckBuilder::new("phi-rigidity", "relative-toponogov:rigidity", Tolerance::absolute(1e-8))
        .applicable(applicable);
    let mut pairs = 0;
    for j in 1..curve.len() {
        if (curve[j - 1].1 - curve[j].1).abs() <= flat {
            pairs += 1;
            let worst = curve[..=j]
                .iter()
                .map(|p| (p.1 - curve[j].1).abs())
                .fold(T::zero(), T::max);
            rigid.compare(f64s(curve[j].0), f64s(worst), 0.0, 0.0);
        }
    }
    if pairs == 0 {
        report.push(Check::skipped(
            "phi-rigidity",
            "relative-toponogov:rigidity",
            Tolerance::absolute(1e-8),
            "no flat step of Φ on the grid",
        ));
    } else {
        report.push(rigid.finish());
    }

    let theta = h.theta;
    let theta_bar = check_angle("θ̄", theta_bar)?;
    let k = h.k;
    if theta_bar == theta {
        for name in ["angle-quotient-monotone", "angle-quotient-limit"] {
            report.push(Check::skipped(name, "relative-toponogov:angle-quotient", tol, "θ̄ = θ"));
        }
        return Ok(report);
    }
    let decreasing = theta_bar < theta;
    let rows: Vec<(T, T, T)> = grid
        .par_iter()
        .map(|&t| {
            let bar = k.phi_raw(law_of_cosines(k, h.a, t, theta_bar).expect("hinge sides are in the domain"));
            let num = k.phi_raw(h.span(t)) - bar;
            let den = k.phi_raw(h.model_span(t)) - bar;
            (t, num, den)
        })
        .collect();
    let kept: Vec<(T, T)> = rows
        .iter()
        .filter(|r| r.2.abs() >= T::lit(DENOMINATOR_FLOOR))
        .map(|r| (r.0, r.1 / r.2))
        .collect();
    let skipped: Vec<f64> = rows
        .iter()
        .filter(|r| r.2.abs() < T::lit(DENOMINATOR_FLOOR))
        .map(|r| f64s(r.0))
        .collect();
    let mut q =
        CheckBuilder::new("angle-quotient-monotone", "relative-toponogov:angle-quotient", tol).applicable(applicable);
    for w in kept.windows(2) {
        if decreasing {
            q.compare(f64s(w[1].0), f64s(w[1].1), f64s(w[0].1), 0.0);
        } else {
            q.compare(f64s(w[1].0), f64s(w[0].1), f64s(w[1].1), 0.0);
        }
    }
    if !skipped.is_empty() {
        let shown: Vec<String> = skipped.iter().take(8).map(|t| format!("{t:.6}")).collect();
        q.set_note(format!(
            "{} points with |denominator| < {DENOMINATOR_FLOOR:e} skipped: {}{}",
            skipped.len(),
            shown.join(", "),
            if skipped.len() > 8 { ", …" } else { "" }
        ));
    }
    report.push(q.finish());
    let mut lim = CheckBuilder::new("angle-quotient-limit", "relative-toponogov:angle-quotient-limit", tol)
        .applicable(applicable);
    let head = &kept[..kept.len().min(LIMIT_POINTS)];
    if let Some(limit) = limit_at_zero(head).or(head.first().map(|p| p.1)) {
        let at = f64s(head[0].0);
        if decreasing {
            lim.compare(at, 1.0, f64s(limit), 0.0);
        } else {
            lim.compare(at, f64s(limit), 1.0, 0.0);
        }
        report.value("angle-quotient-limit", f64s(limit));
    }
    report.push(lim.finish());
    report.value("denominator-skipped", skipped.len() as f64);
    Ok(report)
}

/// `φ_k(c(θ₁)) − φ_k(c(θ₂)) = (cos θ₂ − cos θ₁) sn_k(a) sn_k(t)` along the grid.
pub fn cosine_identity_check<T: Scalar>(
    k: Curvature<T>,
    a: T,
    theta1: T,
    theta2: T,
    grid: &[T],
    tol: Tolerance,
) -> Result<VerificationReport> {
    let rows = grid
        .iter()
        .map(|&t| {
            let c1 = law_of_cosines(k, a, t, theta1)?;
            let c2 = law_of_cosines(k, a, t, theta2)?;
            let lhs = k.phi_raw(c1) - k.phi_raw(c2);
            let rhs = (theta2.cos() - theta1.cos()) * k.sn_raw(a) * k.sn_raw(t);
            Ok((t, (lhs - rhs).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut b = CheckBuilder::new("cosine-identity", "law-of-cosines:phi-identity", tol);
    let mut worst = T::zero();
    for (t, gap) in rows {
        worst = worst.max(gap);
        b.compare(f64s(t), f64s(gap), 0.0, 0.0);
    }
    let mut report = VerificationReport::new("cosine-identity");
    report.push(b.finish());
    report.value("max-gap", f64s(worst));
    Ok(report)
}
