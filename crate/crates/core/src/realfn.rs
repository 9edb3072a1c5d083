//! One-dimensional real functions, Dini derivative estimates and the
//! monotonicity / concavity checks built on them.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modelfn::Curvature;
use crate::numeric::{limit_at_zero, linspace};
use crate::report::{Check, CheckBuilder, Tolerance, VerificationReport};
use crate::Scalar;

pub type Closure<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    ClosedForm,
    Sampled,
}

/// Tabulated function. Interpolation is piecewise linear unless derivative
/// samples are attached, in which case it is Hermite (cubic with slopes,
/// quintic with slopes and second derivatives).
#[derive(Debug, Clone, PartialEq)]
pub struct Samples<T> {
    t: Vec<T>,
    v: Vec<T>,
    d1: Option<Vec<T>>,
    d2: Option<Vec<T>>,
}

impl<T: Scalar> Samples<T> {
    pub fn new(t: Vec<T>, v: Vec<T>) -> Result<Self> {
        if t.len() < 2 || t.len() != v.len() {
            return Err(Error::Config(format!(
                "sampled function needs at least two (t, value) pairs of equal length, got {} and {}",
                t.len(),
                v.len()
            )));
        }
        if let Some(i) = t.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(Error::Config(format!(
                "abscissae must be strictly increasing (rows {} and {})",
                i + 1,
                i + 2
            )));
        }
        if t.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::Config("sampled function contains non-finite entries".into()));
        }
        Ok(Samples {
            t,
            v,
            d1: None,
            d2: None,
        })
    }

    pub fn with_slopes(mut self, d1: Vec<T>) -> Result<Self> {
        if d1.len() != self.t.len() || d1.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(
                "slope samples must be finite and match the abscissae".into(),
            ));
        }
        self.d1 = Some(d1);
        Ok(self)
    }

    /// Second-derivative samples; requires slopes.
    pub fn with_second(mut self, d2: Vec<T>) -> Result<Self> {
        if self.d1.is_none() || d2.len() != self.t.len() || d2.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config(
                "second-derivative samples need slopes and matching length".into(),
            ));
        }
        self.d2 = Some(d2);
        Ok(self)
    }

    pub fn abscissae(&self) -> &[T] {
        &self.t
    }

    pub fn values(&self) -> &[T] {
        &self.v
    }

    pub fn slopes(&self) -> Option<&[T]> {
        self.d1.as_deref()
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    // segment index, local coordinate in [0,1), width
    fn locate(&self, x: T) -> (usize, T, T) {
        let n = self.t.len();
        let i = self.t.partition_point(|&ti| ti <= x).clamp(1, n - 1) - 1;
        let h = self.t[i + 1] - self.t[i];
        let s = ((x - self.t[i]) / h).max(T::zero()).min(T::one());
        (i, s, h)
    }

    pub fn eval(&self, x: T) -> T {
        let n = self.t.len();
        if x <= self.t[0] {
            return self.v[0];
        }
        if x >= self.t[n - 1] {
            return self.v[n - 1];
        }
        let (i, s, h) = self.locate(x);
        let (v0, v1) = (self.v[i], self.v[i + 1]);
        let c = |x: f64| T::lit(x);
        match (&self.d1, &self.d2) {
            (Some(d1), Some(d2)) => {
                let (s2, s3) = (s * s, s * s * s);
                let (s4, s5) = (s3 * s, s3 * s2);
                let h0 = T::one() - c(10.0) * s3 + c(15.0) * s4 - c(6.0) * s5;
                let h1 = s - c(6.0) * s3 + c(8.0) * s4 - c(3.0) * s5;
                let h2 = (s2 - c(3.0) * s3 + c(3.0) * s4 - s5) / c(2.0);
                let h3 = c(10.0) * s3 - c(15.0) * s4 + c(6.0) * s5;
                let h4 = -c(4.0) * s3 + c(7.0) * s4 - c(3.0) * s5;
                let h5 = (s3 - c(2.0) * s4 + s5) / c(2.0);
                h0 * v0 + h1 * h * d1[i] + h2 * h * h * d2[i] + h3 * v1 + h4 * h * d1[i + 1] + h5 * h * h * d2[i + 1]
            }
            (Some(d1), None) => {
                let (s2, s3) = (s * s, s * s * s);
                let h00 = c(2.0) * s3 - c(3.0) * s2 + T::one();
                let h10 = s3 - c(2.0) * s2 + s;
                let h01 = c(3.0) * s2 - c(2.0) * s3;
                let h11 = s3 - s2;
                h00 * v0 + h10 * h * d1[i] + h01 * v1 + h11 * h * d1[i + 1]
            }
            _ => v0 + (v1 - v0) * s,
        }
    }

    /// Derivative of the interpolant (right derivative at nodes).
    pub fn slope(&self, x: T) -> T {
        let (i, s, h) = self.locate(x);
        let (v0, v1) = (self.v[i], self.v[i + 1]);
        let c = |x: f64| T::lit(x);
        match (&self.d1, &self.d2) {
            (Some(d1), Some(d2)) => {
                let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
                let g0 = -c(30.0) * s2 + c(60.0) * s3 - c(30.0) * s4;
                let g1 = T::one() - c(18.0) * s2 + c(32.0) * s3 - c(15.0) * s4;
                let g2 = (c(2.0) * s - c(9.0) * s2 + c(12.0) * s3 - c(5.0) * s4) / c(2.0);
                let g4 = -c(12.0) * s2 + c(28.0) * s3 - c(15.0) * s4;
                let g5 = (c(3.0) * s2 - c(8.0) * s3 + c(5.0) * s4) / c(2.0);
                (g0 * (v0 - v1) + g1 * h * d1[i] + g2 * h * h * d2[i] + g4 * h * d1[i + 1] + g5 * h * h * d2[i + 1]) / h
            }
            (Some(d1), None) => {
                let s2 = s * s;
                let g00 = c(6.0) * s2 - c(6.0) * s;
                let g10 = c(3.0) * s2 - c(4.0) * s + T::one();
                let g11 = c(3.0) * s2 - c(2.0) * s;
                (g00 * (v0 - v1) + g10 * h * d1[i] + g11 * h * d1[i + 1]) / h
            }
            _ => (v1 - v0) / h,
        }
    }
}

#[derive(Clone)]
enum Body<T> {
    Closed(Closure<T>),
    Sampled(Arc<Samples<T>>),
}

/// A real function on `[start, end]` (normally `[0, l]`).
#[derive(Clone)]
pub struct FunctionSpec<T> {
    name: String,
    start: T,
    end: T,
    body: Body<T>,
    derivative: Option<Closure<T>>,
    model: Option<T>,
}

impl<T: Scalar> fmt::Debug for FunctionSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("name", &self.name)
            .field("domain", &(self.start, self.end))
            .field("kind", &self.kind())
            .finish()
    }
}

impl<T: Scalar> FunctionSpec<T> {
    pub fn closed_form<F>(name: impl Into<String>, l: T, f: F) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        Self::closed_form_on(name, T::zero(), l, f)
    }

    pub fn closed_form_on<F>(name: impl Into<String>, start: T, end: T, f: F) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::domain(
                "l",
                end.as_f64(),
                format!("finite values above {}", start.as_f64()),
            ));
        }
        Ok(FunctionSpec {
            name: name.into(),
            start,
            end,
            body: Body::Closed(Arc::new(f)),
            derivative: None,
            model: None,
        })
    }

    /// Attaches an exact derivative.
    pub fn with_derivative<F>(mut self, df: F) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(df));
        self
    }

    pub fn sampled(name: impl Into<String>, samples: Samples<T>) -> Self {
        let start = samples.t[0];
        let end = samples.t[samples.len() - 1];
        FunctionSpec {
            name: name.into(),
            start,
            end,
            body: Body::Sampled(Arc::new(samples)),
            derivative: None,
            model: None,
        }
    }

    /// sn_k on `[0, l]`, tagged with its curvature.
    pub fn model(k: Curvature<T>, l: T) -> Result<Self> {
        let l = k.domain().admit("l", l)?;
        let mut f = Self::closed_form(format!("sn:{}", k.value()), l, move |t| k.sn_raw(t))?
            .with_derivative(move |t| k.csn_raw(t));
        f.model = Some(k.value());
        Ok(f)
    }

    /// Loads a two-column `(t, f(t))` CSV; interpolation is piecewise linear.
    pub fn from_csv<R: Read>(name: impl Into<String>, reader: R) -> Result<Self> {
        let name = name.into();
        let rows = read_pairs(reader, &name)?;
        let (t, v): (Vec<T>, Vec<T>) = rows.into_iter().map(|(a, b)| (T::lit(a), T::lit(b))).unzip();
        let samples = Samples::new(t, v).map_err(|e| Error::Data {
            source_name: name.clone(),
            line: None,
            message: e.to_string(),
        })?;
        Ok(Self::sampled(name, samples))
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Data {
            source_name: path.display().to_string(),
            line: None,
            message: e.to_string(),
        })?;
        Self::from_csv(path.display().to_string(), file)
    }

    /// `t ↦ g(t, f(t))` on the same domain.
    pub fn derive<G>(&self, name: impl Into<String>, g: G) -> Self
    where
        G: Fn(T, T) -> T + Send + Sync + 'static,
    {
        let inner = self.clone();
        FunctionSpec {
            name: name.into(),
            start: self.start,
            end: self.end,
            body: Body::Closed(Arc::new(move |t| g(t, inner.eval(t)))),
            derivative: None,
            model: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn start(&self) -> T {
        self.start
    }

    /// Right end `l` of the domain.
    pub fn end(&self) -> T {
        self.end
    }

    pub fn span(&self) -> T {
        self.end - self.start
    }

    pub fn kind(&self) -> FunctionKind {
        match self.body {
            Body::Closed(_) => FunctionKind::ClosedForm,
            Body::Sampled(_) => FunctionKind::Sampled,
        }
    }

    pub fn samples(&self) -> Option<&Samples<T>> {
        match &self.body {
            Body::Sampled(s) => Some(s),
            Body::Closed(_) => None,
        }
    }

    /// `Some(k̄)` when this is exactly sn_k̄.
    pub fn model_curvature(&self) -> Option<T> {
        self.model
    }

    pub fn contains(&self, t: T) -> bool {
        t >= self.start && t <= self.end
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        match &self.body {
            Body::Closed(f) => f(t),
            Body::Sampled(s) => s.eval(t),
        }
    }

    pub fn try_eval(&self, t: T) -> Result<T> {
        if self.contains(t) {
            Ok(self.eval(t))
        } else {
            Err(self.outside("t", t))
        }
    }

    /// Exact derivative when one is known.
    pub fn derivative(&self, t: T) -> Option<T> {
        match (&self.derivative, &self.body) {
            (Some(df), _) => Some(df(t)),
            (None, Body::Sampled(s)) if s.d1.is_some() => Some(s.slope(t)),
            _ => None,
        }
    }

    fn outside(&self, what: &'static str, t: T) -> Error {
        Error::domain(
            what,
            t.as_f64(),
            format!("[{}, {}]", self.start.as_f64(), self.end.as_f64()),
        )
    }
}

/// Reads `(x, y)` rows from a two-column CSV; a non-numeric first row is
/// treated as a header.
pub fn read_pairs<R: Read>(reader: R, source_name: &str) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut out = Vec::new();
    for (idx, rec) in rdr.records().enumerate() {
        let bad = |line: Option<u64>, message: String| Error::Data {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let rec = rec.map_err(|e| bad(e.position().map(|p| p.line()), e.to_string()))?;
        let line = rec.position().map(|p| p.line());
        if rec.len() < 2 {
            return Err(bad(line, format!("expected two columns, found {}", rec.len())));
        }
        let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
        match parsed {
            (Ok(a), Ok(b)) => out.push((a, b)),
            _ if idx == 0 => continue,
            _ => {
                return Err(bad(
                    line,
                    format!("cannot parse '{}', '{}' as numbers", &rec[0], &rec[1]),
                ));
            }
        }
    }
    Ok(out)
}

/// Which Dini derivative to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiniSide {
    UpperRight,
    LowerRight,
    UpperLeft,
    LowerLeft,
}

impl DiniSide {
    pub fn is_right(self) -> bool {
        matches!(self, DiniSide::UpperRight | DiniSide::LowerRight)
    }

    pub fn is_upper(self) -> bool {
        matches!(self, DiniSide::UpperRight | DiniSide::UpperLeft)
    }
}

/// Geometric step sequence `h₀, h₀q, …, h₀q^{J−1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HSchedule<T> {
    initial: T,
    ratio: T,
    count: usize,
    tail: usize,
}

impl<T: Scalar> HSchedule<T> {
    pub fn new(initial: T, ratio: T, count: usize, tail: usize, span: T) -> Result<Self> {
        if !(initial > T::zero() && initial.is_finite()) {
            return Err(Error::domain("h0", initial.as_f64(), "(0, inf)"));
        }
        if !(ratio > T::zero() && ratio < T::one()) {
            return Err(Error::domain("q", ratio.as_f64(), "(0, 1)"));
        }
        if tail == 0 || tail > count {
            return Err(Error::Config(format!("tail {tail} must lie in 1..={count}")));
        }
        if count > Self::max_count(initial, ratio, span) {
            return Err(Error::Config(format!(
                "{count} steps from {} by {} underflow the resolvable scale of a span {}",
                initial.as_f64(),
                ratio.as_f64(),
                span.as_f64()
            )));
        }
        Ok(HSchedule {
            initial,
            ratio,
            count,
            tail,
        })
    }

    /// `l/100`, halving, 20 steps, tail of 5; shortened for low precision.
    pub fn dini_default(span: T) -> Self {
        Self::capped(span / T::lit(100.0), T::lit(0.5), 20, 5, span)
    }

    /// Schedule for Richardson-extrapolated second differences.
    pub fn second_order(span: T) -> Self {
        Self::capped(span / T::lit(64.0), T::lit(0.5), 4, 2, span)
    }

    fn capped(initial: T, ratio: T, count: usize, tail: usize, span: T) -> Self {
        let count = count.min(Self::max_count(initial, ratio, span)).max(tail);
        HSchedule {
            initial,
            ratio,
            count,
            tail,
        }
    }

    // largest J with h₀q^J > ε·span·1e3
    fn max_count(initial: T, ratio: T, span: T) -> usize {
        let floor = T::epsilon() * span.abs() * T::lit(1e3);
        let mut h = initial;
        let mut j = 0usize;
        while j < 4096 && h * ratio > floor {
            h = h * ratio;
            j += 1;
        }
        j
    }

    pub fn initial(&self) -> T {
        self.initial
    }

    pub fn ratio(&self) -> T {
        self.ratio
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn tail(&self) -> usize {
        self.tail
    }

    pub fn steps(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.count).scan(self.initial, move |h, _| {
            let cur = *h;
            *h = *h * self.ratio;
            Some(cur)
        })
    }

    pub fn smallest(&self) -> T {
        self.steps().last().unwrap_or(self.initial)
    }

    /// Shrinks the schedule so every step fits in `room`; `None` if the
    /// shortened schedule cannot keep its tail.
    pub fn fitted(&self, room: T, span: T) -> Option<Self> {
        if !(room > T::zero()) {
            return None;
        }
        let initial = self.initial.min(room);
        let count = self.count.min(Self::max_count(initial, self.ratio, span));
        (count >= self.tail && count > 0).then_some(HSchedule {
            initial,
            count,
            ..*self
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiniEstimate<T> {
    /// May be ±∞.
    pub value: T,
    /// `(h, quotient)` for every step of the schedule.
    pub quotients: Vec<(T, T)>,
    pub side: DiniSide,
    /// Spread of the tail plus the roundoff floor of the smallest step.
    pub resolution: T,
}

impl<T: Scalar> DiniEstimate<T> {
    /// Neville extrapolation of the tail to `h = 0`; finite estimates only.
    pub fn extrapolated(&self, tail: usize) -> Option<T> {
        if !self.value.is_finite() {
            return None;
        }
        let start = self.quotients.len().saturating_sub(tail);
        limit_at_zero(&self.quotients[start..]).filter(|v| v.is_finite())
    }
}

/// Estimates one Dini derivative of `f` at `t` over `schedule`.
pub fn dini<T: Scalar>(f: &FunctionSpec<T>, t: T, side: DiniSide, schedule: &HSchedule<T>) -> Result<DiniEstimate<T>> {
    if !f.contains(t) {
        return Err(f.outside("t", t));
    }
    let h0 = schedule.initial();
    let fits = if side.is_right() {
        t + h0 <= f.end()
    } else {
        t - h0 >= f.start()
    };
    if !fits {
        return Err(Error::domain(
            "h0",
            h0.as_f64(),
            format!(
                "steps inside [{}, {}] from t = {}",
                f.start().as_f64(),
                f.end().as_f64(),
                t.as_f64()
            ),
        ));
    }
    let ft = f.eval(t);
    let mut mag = ft.abs();
    let quotients: Vec<(T, T)> = schedule
        .steps()
        .map(|h| {
            let (q, other) = if side.is_right() {
                let v = f.eval(t + h);
                ((v - ft) / h, v)
            } else {
                let v = f.eval(t - h);
                ((ft - v) / h, v)
            };
            mag = mag.max(other.abs());
            (h, q)
        })
        .collect();
    let tail = &quotients[quotients.len() - schedule.tail()..];
    let (lo, hi) = tail
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &(_, q)| {
            (lo.min(q), hi.max(q))
        });
    let mut value = if side.is_upper() { hi } else { lo };
    let floor = T::lit(4.0) * T::epsilon() * mag / schedule.smallest();
    let big = T::one() / (T::epsilon() * f.span());
    if value.abs() > big || diverges(tail, schedule.ratio(), floor) {
        value = if value > T::zero() {
            T::infinity()
        } else {
            T::neg_infinity()
        };
    }
    // a bias linear in h leaves the extreme tail quotient off by spread/(1 − q^(n−1))
    let reach = T::one() - schedule.ratio().powi(schedule.tail() as i32 - 1);
    Ok(DiniEstimate {
        value,
        quotients,
        side,
        resolution: (hi - lo) / reach + floor,
    })
}

// quotients blowing up like 1/h, as across a jump
fn diverges<T: Scalar>(tail: &[(T, T)], ratio: T, floor: T) -> bool {
    let growth = T::lit(0.9) / ratio;
    tail.len() >= 2
        && tail.windows(2).all(|w| {
            let (a, b) = (w[0].1, w[1].1);
            a.signum() == b.signum() && b.abs() >= growth * a.abs()
        })
        && tail[tail.len() - 1].1.abs() > T::lit(1e3) * floor
}

/// [`dini`] with the schedule shrunk to the room available at `t`.
pub fn dini_fitted<T: Scalar>(
    f: &FunctionSpec<T>,
    t: T,
    side: DiniSide,
    base: &HSchedule<T>,
) -> Option<DiniEstimate<T>> {
    let room = if side.is_right() { f.end() - t } else { t - f.start() };
    let s = base.fitted(room, f.span())?;
    dini(f, t, side, &s).ok()
}

fn f64s<T: Scalar>(v: T) -> f64 {
    v.as_f64()
}

/// Dini criterion for `f` to be nonincreasing: `D⁺f ≤ 0` and `D⁻f ≤ 0` on
/// the grid (only `D⁺` at the left end and `D⁻` at the right end).
pub fn is_decreasing_dini<T: Scalar>(f: &FunctionSpec<T>, grid: &[T], tol: Tolerance) -> VerificationReport {
    let mut report = VerificationReport::new("dini-monotonicity");
    report.push(dini_nonpositive(
        f,
        grid,
        tol,
        T::zero(),
        "dini-nonpositive",
        "monotonicity:dini",
    ));
    report
}

fn dini_nonpositive<T: Scalar>(
    f: &FunctionSpec<T>,
    grid: &[T],
    tol: Tolerance,
    extra: T,
    name: &str,
    anchor: &str,
) -> Check {
    let base = HSchedule::dini_default(f.span());
    let rows: Vec<Vec<(T, T, T)>> = grid
        .par_iter()
        .map(|&t| {
            let mut out = Vec::with_capacity(2);
            if !f.contains(t) {
                return out;
            }
            for side in [DiniSide::UpperRight, DiniSide::UpperLeft] {
                if let Some(d) = dini_fitted(f, t, side, &base) {
                    out.push((t, d.value, d.resolution + extra));
                }
            }
            out
        })
        .collect();
    let mut b = CheckBuilder::new(name, anchor, tol);
    for (t, d, res) in rows.into_iter().flatten() {
        b.compare(f64s(t), f64s(d), 0.0, f64s(res));
    }
    b.finish()
}

/// Support-sense test of `f″ + k f ≤ 0` by Richardson-extrapolated symmetric
/// second differences.
pub fn support_sense_jacobi<T: Scalar>(
    f: &FunctionSpec<T>,
    k: Curvature<T>,
    grid: &[T],
    schedule: &HSchedule<T>,
    tol: Tolerance,
) -> VerificationReport {
    let mut report = VerificationReport::new("support-sense");
    report.push(support_sense_check(f, k, grid, schedule, tol));
    report
}

pub(crate) fn support_sense_check<T: Scalar>(
    f: &FunctionSpec<T>,
    k: Curvature<T>,
    grid: &[T],
    schedule: &HSchedule<T>,
    tol: Tolerance,
) -> Check {
    let rows: Vec<Option<(T, T, T, T)>> = grid
        .par_iter()
        .map(|&t| {
            let room = (t - f.start()).min(f.end() - t);
            let s = schedule.fitted(room, f.span())?;
            let (est, noise) = second_difference(f, t, &s);
            Some((t, est, -k.value() * f.eval(t), noise))
        })
        .collect();
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    let mut b = CheckBuilder::new("second-difference-bound", "support-sense:jacobi", tol);
    for (t, lhs, rhs, res) in rows.into_iter().flatten() {
        b.compare(f64s(t), f64s(lhs), f64s(rhs), f64s(res));
    }
    if skipped > 0 {
        b.set_note(format!("{skipped} grid points without room for the step schedule"));
    }
    b.finish()
}

// extrapolated second difference at t and its roundoff allowance
fn second_difference<T: Scalar>(f: &FunctionSpec<T>, t: T, s: &HSchedule<T>) -> (T, T) {
    let ft = f.eval(t);
    let two = T::lit(2.0);
    let mut mag = ft.abs();
    let q: Vec<(T, T)> = s
        .steps()
        .map(|tau| {
            let (a, b) = (f.eval(t + tau), f.eval(t - tau));
            mag = mag.max(a.abs()).max(b.abs());
            (tau, (a + b - two * ft) / (tau * tau))
        })
        .collect();
    let q2 = s.ratio() * s.ratio();
    let rich: Vec<T> = q.windows(2).map(|w| (w[1].1 - q2 * w[0].1) / (T::one() - q2)).collect();
    let tail: &[T] = if rich.is_empty() {
        std::slice::from_ref(&q[q.len() - 1].1)
    } else {
        &rich[rich.len() - s.tail().min(rich.len())..]
    };
    // lower Schwarz derivative: the smallest of the tail extrapolants and the
    // finest raw quotient, which stays clear of seams the coarser stencils cross
    let (lo, hi) = tail.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let est = lo.min(q[q.len() - 1].1);
    let tau_min = s.smallest();
    let noise = T::lit(4.0) * T::epsilon() * mag / (tau_min * tau_min) * (T::one() + q2 * q2) / (T::one() - q2);
    // truncation error shows up as disagreement between extrapolants
    let paired: Vec<(T, T)> = tail.iter().map(|&v| (tau_min, v)).collect();
    let spread = if lo.is_finite() && hi.is_finite() && !diverges(&paired, s.ratio(), noise) {
        hi - lo
    } else {
        T::zero()
    };
    (est, noise + spread)
}

/// Monotonicity of `f / sn_k` along the grid.
pub fn quotient_monotone<T: Scalar>(
    f: &FunctionSpec<T>,
    k: Curvature<T>,
    grid: &[T],
    tol: Tolerance,
) -> VerificationReport {
    let mut report = VerificationReport::new("quotient-monotonicity");
    let (check, limit) = quotient_check(f, k, grid, tol);
    report.push(check);
    if let Some(l) = limit {
        report.value("limit-at-smallest-t", f64s(l));
    }
    report
}

fn quotient_check<T: Scalar>(f: &FunctionSpec<T>, k: Curvature<T>, grid: &[T], tol: Tolerance) -> (Check, Option<T>) {
    let top = k.max_radius();
    let pts: Vec<(T, T)> = grid
        .iter()
        .copied()
        .filter(|&t| t > T::zero() && f.contains(t) && t < top)
        .map(|t| (t, f.eval(t) / k.sn_raw(t)))
        .collect();
    let mut b = CheckBuilder::new("ratio-nonincreasing", "quotient:ratio-decreasing", tol);
    for w in pts.windows(2) {
        b.compare(f64s(w[1].0), f64s(w[1].1), f64s(w[0].1), 0.0);
    }
    let dropped = grid.len() - pts.len();
    if dropped > 0 {
        b.set_note(format!(
            "{dropped} grid points outside (0, l] or past the conjugate radius"
        ));
    }
    (b.finish(), pts.first().map(|p| p.1))
}

/// Sampled profile of right-derivative estimates (left estimate at the end).
pub fn right_derivative_profile<T: Scalar>(
    f: &FunctionSpec<T>,
    grid: &[T],
    schedule: &HSchedule<T>,
) -> Result<FunctionSpec<T>> {
    let vals: Vec<Result<T>> = grid
        .par_iter()
        .map(|&t| {
            let est = dini_fitted(f, t, DiniSide::UpperRight, schedule)
                .or_else(|| dini_fitted(f, t, DiniSide::UpperLeft, schedule))
                .ok_or_else(|| f.outside("t", t))?;
            if est.value.is_finite() {
                Ok(est.value)
            } else {
                Err(Error::Hypothesis(format!(
                    "one-sided derivative diverges at t = {}",
                    t.as_f64()
                )))
            }
        })
        .collect();
    let v = vals.into_iter().collect::<Result<Vec<T>>>()?;
    let s = Samples::new(grid.to_vec(), v)?;
    Ok(FunctionSpec::sampled(format!("{}'+", f.name()), s))
}

/// `f′₋(t) ≥ f′₊(t)` at interior grid points.
pub fn derivative_gap_check<T: Scalar>(
    f: &FunctionSpec<T>,
    grid: &[T],
    schedule: &HSchedule<T>,
    tol: Tolerance,
) -> VerificationReport {
    let rows: Vec<Option<(T, T, T, T)>> = grid
        .par_iter()
        .map(|&t| {
            let r = dini_fitted(f, t, DiniSide::UpperRight, schedule)?;
            let l = dini_fitted(f, t, DiniSide::UpperLeft, schedule)?;
            Some((t, r.value, l.value, r.resolution + l.resolution))
        })
        .collect();
    let mut b = CheckBuilder::new("left-derivative-dominates", "concavity:one-sided-derivatives", tol);
    for (t, r, l, res) in rows.into_iter().flatten() {
        b.compare(f64s(t), f64s(r), f64s(l), f64s(res));
    }
    let mut report = VerificationReport::new("derivative-gap");
    report.push(b.finish());
    report
}

/// Right derivative at the left end, extrapolated, with its uncertainty.
fn initial_slope<T: Scalar>(f: &FunctionSpec<T>) -> Result<(T, T)> {
    let base = HSchedule::dini_default(f.span());
    let d = dini(f, f.start(), DiniSide::UpperRight, &base)?;
    match d.extrapolated(base.tail()) {
        Some(x) => Ok((x, (x - d.value).abs().min(d.resolution))),
        None => Ok((d.value, d.resolution)),
    }
}

/// `ψ = f − f′₊(0)·sn_k` is nonincreasing and `f ≤ f′₊(0)·sn_k`.
pub fn model_difference_check<T: Scalar>(
    f: &FunctionSpec<T>,
    k: Curvature<T>,
    grid: &[T],
    tol: Tolerance,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("model-difference");
    let (s, s_res) = initial_slope(f)?;
    report.value("initial-slope", f64s(s));
    let applicable = f.end() <= k.half_radius() * (T::one() + T::lit(1e-12));
    if !applicable {
        report.warn(format!(
            "l = {} exceeds the half radius {}; a decreasing difference is not guaranteed",
            f.end().as_f64(),
            k.half_radius().as_f64()
        ));
    }
    let psi = f.derive(format!("{}-minus-model", f.name()), move |t, ft| ft - s * k.sn_raw(t));
    let span = f.span();
    let extra = s_res * k.csn_raw(T::zero()).abs().max(k.csn_raw(span).abs());
    let mut c = dini_nonpositive(
        &psi,
        grid,
        tol,
        extra,
        "difference-nonincreasing",
        "model-difference:decreasing",
    );
    if !applicable && c.status == crate::report::Status::Fail {
        c.status = crate::report::Status::ExpectedPossibleFail;
    }
    report.push(c);
    let mut b = CheckBuilder::new("below-scaled-model", "model-difference:bound", tol);
    for &t in grid.iter().filter(|&&t| f.contains(t) && t < k.max_radius()) {
        let sn = k.sn_raw(t);
        b.compare(f64s(t), f64s(f.eval(t)), f64s(s * sn), f64s(s_res * sn.abs()));
    }
    report.push(b.finish());
    Ok(report)
}

/// The four consequences of the support-sense inequality on one function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConcaveConsequence {
    /// `f(l) = 0` forces `f ≥ 0`.
    NonnegativeIfEndVanishes,
    /// Touching the scaled model at `t₀` forces agreement on `[0, t₀]`.
    EqualityPropagates,
    /// For `k > 0`, the maximum before the first zero lies before π/(2√k).
    PeakBeforeHalfRadius,
    /// For `k > 0` and `f′₊(0) < 0`, strict decrease on `[0, π/(2√k)]`.
    StrictDecreaseIfNegativeSlope,
}

const CONSEQUENCE_GRID: usize = 2001;

pub fn concave_consequences_check<T: Scalar>(
    f: &FunctionSpec<T>,
    k: Curvature<T>,
    variant: ConcaveConsequence,
    tol: Tolerance,
) -> Result<VerificationReport> {
    let grid = linspace(f.start(), f.end(), CONSEQUENCE_GRID);
    let slack = |v: T| T::lit(tol.slack(v.as_f64(), 0.0));
    let (s, s_res) = initial_slope(f)?;
    let mut report = VerificationReport::new("concave-consequences");
    report.value("initial-slope", f64s(s));
    let needs_positive_k = || {
        if k.value() > T::zero() {
            Ok(())
        } else {
            Err(Error::Hypothesis(format!(
                "variant needs k > 0, got {}",
                k.value().as_f64()
            )))
        }
    };
    match variant {
        ConcaveConsequence::NonnegativeIfEndVanishes => {
            let fl = f.eval(f.end());
            if fl.abs() > slack(fl) {
                return Err(Error::Hypothesis(format!("f(l) = {} is not zero", fl.as_f64())));
            }
            if f.end() >= k.max_radius() {
                return Err(Error::Hypothesis("l must stay below the conjugate radius".into()));
            }
            let mut b = CheckBuilder::new("nonnegative", "consequence:nonnegative", tol);
            for &t in &grid {
                b.compare(f64s(t), f64s(-f.eval(t)), 0.0, 0.0);
            }
            report.push(b.finish());
        }
        ConcaveConsequence::EqualityPropagates => {
            let gap = |t: T| f.eval(t) - s * k.sn_raw(t);
            let res = |t: T| s_res * k.sn_raw(t).abs();
            let floor = f.start() + T::lit(1e-2) * f.span();
            let touch = grid
                .iter()
                .copied()
                .filter(|&t| t >= floor && t <= k.max_radius())
                .filter(|&t| gap(t).abs() <= slack(s * k.sn_raw(t)) + res(t))
                .last();
            match touch {
                None => report.push(Check::skipped(
                    "agreement-before-contact",
                    "consequence:equality-propagates",
                    tol,
                    "no contact with the scaled model observed",
                )),
                Some(t0) => {
                    report.value("contact", f64s(t0));
                    let mut b = CheckBuilder::new("agreement-before-contact", "consequence:equality-propagates", tol);
                    for &t in grid.iter().filter(|&&t| t <= t0) {
                        b.compare(f64s(t), f64s(gap(t).abs()), 0.0, f64s(res(t)));
                    }
                    report.push(b.finish());
                }
            }
        }
        ConcaveConsequence::PeakBeforeHalfRadius => {
            needs_positive_k()?;
            let t0 = grid
                .iter()
                .copied()
                .skip(1)
                .find(|&t| f.eval(t) <= slack(T::zero()))
                .ok_or_else(|| Error::Hypothesis("f has no zero in (0, l]".into()))?;
            if t0 > k.max_radius() * (T::one() + T::lit(1e-12)) {
                return Err(Error::Hypothesis("first zero lies beyond the conjugate radius".into()));
            }
            report.value("first-zero", f64s(t0));
            let inside: Vec<T> = grid.iter().copied().filter(|&t| t <= t0).collect();
            let peak = refine_argmax(f, &inside);
            report.value("argmax", f64s(peak));
            let half = k.half_radius();
            let res = T::lit(1e-7) * (T::one() + f.span());
            let mut b = CheckBuilder::new("argmax-before-half-radius", "consequence:peak-location", tol);
            b.compare(f64s(peak), f64s(peak), f64s(half), f64s(res));
            report.push(b.finish());
            if (peak - half).abs() <= res {
                let mut b = CheckBuilder::new("model-up-to-peak", "consequence:peak-rigidity", tol);
                for &t in inside.iter().filter(|&&t| t <= half) {
                    b.compare(
                        f64s(t),
                        f64s((f.eval(t) - s * k.sn_raw(t)).abs()),
                        0.0,
                        f64s(s_res * k.sn_raw(t)),
                    );
                }
                report.push(b.finish());
            }
        }
        ConcaveConsequence::StrictDecreaseIfNegativeSlope => {
            needs_positive_k()?;
            if !(s + s_res < T::zero()) {
                return Err(Error::Hypothesis(format!("f'+(0) = {} is not negative", s.as_f64())));
            }
            let top = k.half_radius().min(f.end());
            let pts: Vec<T> = grid.iter().copied().filter(|&t| t <= top).collect();
            let mut b = CheckBuilder::new("strictly-decreasing", "consequence:strict-decrease", tol).strict();
            for w in pts.windows(2) {
                b.compare(f64s(w[1]), f64s(f.eval(w[1])), f64s(f.eval(w[0])), 0.0);
            }
            report.push(b.finish());
        }
    }
    Ok(report)
}

// grid argmax polished by golden-section search on the neighbouring cells
fn refine_argmax<T: Scalar>(f: &FunctionSpec<T>, grid: &[T]) -> T {
    let (i, _) = grid
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |(bi, bv), (i, &t)| {
            let v = f.eval(t);
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });
    let mut a = grid[i.saturating_sub(1)];
    let mut b = grid[(i + 1).min(grid.len() - 1)];
    let g = T::lit((5f64.sqrt() - 1.0) / 2.0);
    for _ in 0..200 {
        if b - a <= T::epsilon() * (T::one() + b.abs()) {
            break;
        }
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f.eval(c) >= f.eval(d) {
            b = d;
        } else {
            a = c;
        }
    }
    (a + b) / T::lit(2.0)
}

/// Hypotheses under which the matching equation is solvable:
/// `f ≥ 0`, `f(0) = 0`, `D⁺f(0) = 1`, `f / sn_k` nonincreasing, and `l`
/// below the conjugate radius.
pub fn admissibility_check<T: Scalar>(
    f: &FunctionSpec<T>,
    k: Curvature<T>,
    grid: &[T],
    tol: Tolerance,
) -> VerificationReport {
    let mut report = VerificationReport::new("admissibility");
    let mut b = CheckBuilder::new("nonnegative", "admissible:nonnegative", tol);
    for &t in grid.iter().filter(|&&t| f.contains(t)) {
        b.compare(f64s(t), f64s(-f.eval(t)), 0.0, 0.0);
    }
    report.push(b.finish());
    let mut b = CheckBuilder::new("vanishes-at-zero", "admissible:initial-value", tol);
    let f0 = f.eval(f.start());
    b.compare(f64s(f.start()), f64s(f0.abs()), 0.0, 0.0);
    report.push(b.finish());
    let mut b = CheckBuilder::new("unit-initial-slope", "admissible:initial-slope", tol);
    match dini(f, f.start(), DiniSide::UpperRight, &HSchedule::dini_default(f.span())) {
        Ok(d) => {
            b.compare(
                f64s(f.start()),
                f64s((d.value - T::one()).abs()),
                0.0,
                f64s(d.resolution),
            );
            report.value("initial-slope", f64s(d.value));
        }
        Err(e) => b.set_note(e.to_string()),
    }
    report.push(b.finish());
    let mut b = CheckBuilder::new("below-conjugate-radius", "admissible:domain", tol).strict();
    b.compare(f64s(f.end()), f64s(f.end()), f64s(k.max_radius()), 0.0);
    report.push(b.finish());
    report.push(quotient_check(f, k, grid, tol).0);
    report
}

/// ½sin 2t on `[0, π/2]`, cos t on `[π/2, π]`.
pub fn counterexample_psi<T: Scalar>() -> FunctionSpec<T> {
    let half = T::FRAC_PI_2();
    let two = T::lit(2.0);
    FunctionSpec::closed_form("psi-counterexample", T::PI(), move |t| {
        if t <= half {
            (two * t).sin() / two
        } else {
            t.cos()
        }
    })
    .expect("π is a valid domain end")
    .with_derivative(move |t| if t < half { (two * t).cos() } else { -t.sin() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Status;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn k(v: f64) -> Curvature<f64> {
        Curvature::new(v).unwrap()
    }

    fn cf(l: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> FunctionSpec<f64> {
        FunctionSpec::closed_form("f", l, f).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn linear_samples_hit_nodes() {
        let s = Samples::new(vec![0.0, 0.5, 2.0], vec![1.0, 3.0, -1.0]).unwrap();
        let f = FunctionSpec::sampled("s", s);
        assert_eq!(f.eval(0.5), 3.0);
        assert_eq!(f.eval(2.0), -1.0);
        assert_eq!(f.eval(1.25), 1.0);
        assert_eq!(f.kind(), FunctionKind::Sampled);
        assert!(Samples::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn quintic_hermite_reproduces_quintics() {
        let p = |x: f64| x.powi(5) - 2.0 * x.powi(3) + x;
        let dp = |x: f64| 5.0 * x.powi(4) - 6.0 * x * x + 1.0;
        let ddp = |x: f64| 20.0 * x.powi(3) - 12.0 * x;
        let t = linspace(0.0, 2.0, 5);
        let s = Samples::new(t.clone(), t.iter().map(|&x| p(x)).collect())
            .unwrap()
            .with_slopes(t.iter().map(|&x| dp(x)).collect())
            .unwrap()
            .with_second(t.iter().map(|&x| ddp(x)).collect())
            .unwrap();
        for i in 0..=40 {
            let x = 0.05 * i as f64;
            assert_abs_diff_eq!(s.eval(x), p(x), epsilon = 1e-12);
            assert_abs_diff_eq!(s.slope(x), dp(x), epsilon = 1e-11);
        }
    }

    #[test]
    fn cubic_hermite_reproduces_cubics() {
        let p = |x: f64| x * x * x - x;
        let dp = |x: f64| 3.0 * x * x - 1.0;
        let t = vec![0.0, 0.3, 1.0, 1.7];
        let s = Samples::new(t.clone(), t.iter().map(|&x| p(x)).collect())
            .unwrap()
            .with_slopes(t.iter().map(|&x| dp(x)).collect())
            .unwrap();
        for i in 0..=17 {
            let x = 0.1 * i as f64;
            assert_abs_diff_eq!(s.eval(x), p(x), epsilon = 1e-13);
            assert_abs_diff_eq!(s.slope(x), dp(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn csv_with_and_without_header() {
        let f = FunctionSpec::<f64>::from_csv("a", "t,f\n0,0\n1,2\n2,3\n".as_bytes()).unwrap();
        assert_eq!(f.eval(0.5), 1.0);
        let g = FunctionSpec::<f64>::from_csv("b", "0, 0\n1, 1\n".as_bytes()).unwrap();
        assert_eq!(g.end(), 1.0);
        let e = FunctionSpec::<f64>::from_csv("c", "0,0\n1,x\n".as_bytes()).unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(FunctionSpec::<f64>::from_csv("d", "0,0\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn dini_examples() {
        let s = HSchedule::dini_default(2.0);
        let f = cf(2.0, |t| (t - 1.0).abs());
        assert_abs_diff_eq!(
            dini(&f, 1.0, DiniSide::UpperRight, &s).unwrap().value,
            1.0,
            epsilon = 1e-8
        );
        let s = HSchedule::dini_default(1.0);
        let f = cf(1.0, |t| t * t);
        let d = dini(&f, 0.5, DiniSide::UpperRight, &s).unwrap();
        assert_abs_diff_eq!(d.value, 1.0, epsilon = 1e-6);
        assert_eq!(d.quotients.len(), 20);
        let f = cf(1.0, |t: f64| t.min(1.0 - t));
        assert_abs_diff_eq!(
            dini(&f, 0.5, DiniSide::LowerLeft, &s).unwrap().value,
            1.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            dini(&f, 0.5, DiniSide::UpperRight, &s).unwrap().value,
            -1.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn dini_domain_errors() {
        let s = HSchedule::dini_default(1.0);
        let f = cf(1.0, |t| t);
        assert!(dini(&f, 1.0, DiniSide::UpperRight, &s).is_err());
        assert!(dini(&f, 0.0, DiniSide::LowerLeft, &s).is_err());
        assert!(dini(&f, 1.5, DiniSide::UpperLeft, &s).is_err());
    }

    #[test]
    fn jump_reports_infinity() {
        let f = cf(1.0, |t| if t < 0.5 { 0.0 } else { 1.0 });
        let d = dini(&f, 0.5, DiniSide::UpperLeft, &HSchedule::dini_default(1.0)).unwrap();
        assert_eq!(d.value, f64::INFINITY);
    }

    #[test]
    fn schedule_invariants() {
        assert!(HSchedule::new(0.01, 0.5, 60, 5, 1.0).is_err());
        assert!(HSchedule::new(0.01, 1.5, 10, 5, 1.0).is_err());
        assert!(HSchedule::new(0.01, 0.5, 10, 11, 1.0).is_err());
        let s = HSchedule::<f32>::dini_default(1.0);
        assert!(s.smallest() > f32::EPSILON * 1e3);
        assert!(HSchedule::dini_default(1.0).fitted(0.0, 1.0).is_none());
    }

    #[test]
    fn decreasing_examples() {
        let g = linspace(0.0, 3.0, 61);
        assert!(is_decreasing_dini(&cf(3.0, |t: f64| (-t).exp()), &g, tol()).passed());
        let r = is_decreasing_dini(&cf(3.0, |t| t), &g, tol());
        let c = &r.checks[0];
        assert_eq!(c.status, Status::Fail);
        assert!(c.samples.iter().all(|s| (s.lhs - 1.0).abs() < 1e-6));
    }

    #[test]
    fn psi_counterexample() {
        let f = counterexample_psi::<f64>();
        assert_abs_diff_eq!(f.eval(FRAC_PI_2), 0.0, epsilon = 1e-16);
        let psi = f.derive("psi", |t, v| v - t.sin());
        assert_abs_diff_eq!(psi.eval(3.0 * PI / 4.0), -(2f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(psi.eval(PI), -1.0, epsilon = 1e-15);
        let g = linspace(0.0, PI, 201);
        let r = is_decreasing_dini(&psi, &g[..200], tol());
        let w = r.checks[0].witness.unwrap();
        assert!(w.location > FRAC_PI_2 && w.location < PI);
        let interior = &g[1..200];
        let s = support_sense_jacobi(&f, k(1.0), interior, &HSchedule::second_order(PI), tol());
        assert!(s.passed(), "{:?}", s.checks[0].witness);
    }

    #[test]
    fn support_sense_examples() {
        let g = linspace(0.05, PI - 0.05, 60);
        let f = FunctionSpec::model(k(1.0), PI).unwrap();
        let r = support_sense_jacobi(&f, k(1.0), &g, &HSchedule::second_order(PI), tol());
        assert!(r.passed(), "{:?}", r.checks[0].witness);
        for s in &r.checks[0].samples {
            assert_abs_diff_eq!(s.lhs, s.rhs, epsilon = 1e-9);
        }
        let r = support_sense_jacobi(&cf(PI, |t| t), k(1.0), &g, &HSchedule::second_order(PI), tol());
        assert_eq!(r.checks[0].status, Status::Fail);
        let f = cf(1.0, |t: f64| t.min(1.0 - t));
        let g = linspace(0.01, 0.99, 99);
        let r = support_sense_jacobi(&f, k(0.0), &g, &HSchedule::second_order(1.0), tol());
        assert!(r.passed());
        let corner = r.checks[0]
            .samples
            .iter()
            .find(|s| (s.location - 0.5).abs() < 1e-12)
            .unwrap();
        assert!(corner.lhs < -10.0);
        let convex = cf(1.0, |t: f64| (t - 0.5).abs());
        let r = support_sense_jacobi(&convex, k(0.0), &g, &HSchedule::second_order(1.0), tol());
        assert_eq!(r.checks[0].status, Status::Fail);
    }

    #[test]
    fn quotient_examples() {
        let l = PI / 2f64.sqrt();
        let f = FunctionSpec::model(k(2.0), l).unwrap();
        let g = linspace(l / 1000.0, l * 0.999, 1000);
        assert!(quotient_monotone(&f, k(1.0), &g, tol()).passed());
        let f = FunctionSpec::model(k(1.0), 3.0).unwrap();
        let g = linspace(0.01, 3.0, 300);
        let r = quotient_monotone(&f, k(1.0), &g, tol());
        assert!(r.passed());
        assert_abs_diff_eq!(r.values["limit-at-smallest-t"], 1.0, epsilon = 1e-15);
        let r = quotient_monotone(&cf(3.0, |t| t), k(1.0), &g, tol());
        assert!(!r.passed());
        let zero = quotient_monotone(&cf(3.0, |_| 0.0), k(1.0), &g, tol());
        assert!(zero.passed());
    }

    #[test]
    fn derivative_profiles() {
        let s = HSchedule::dini_default(1.0);
        let g = linspace(0.0, 1.0, 41);
        let p = right_derivative_profile(&cf(1.0, |t| -t * t), &g, &s).unwrap();
        for &t in &g {
            assert_abs_diff_eq!(p.eval(t), -2.0 * t, epsilon = 1e-6);
        }
        assert!(is_decreasing_dini(&p, &g, tol()).passed());
        let corner = cf(1.0, |t: f64| t.min(1.0 - t));
        let g = linspace(0.0, 1.0, 21);
        let p = right_derivative_profile(&corner, &g, &s).unwrap();
        assert_abs_diff_eq!(p.eval(0.45), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(p.eval(0.5), -1.0, epsilon = 1e-9);
        assert!(is_decreasing_dini(&p, &g, tol()).passed());
        assert!(derivative_gap_check(&corner, &g[1..20], &s, tol()).passed());
        let gap = derivative_gap_check(&corner, &[0.5], &s, tol());
        let smp = gap.checks[0].samples[0];
        assert_abs_diff_eq!(smp.rhs - smp.lhs, 2.0, epsilon = 1e-9);
        let sine = FunctionSpec::model(k(1.0), FRAC_PI_2).unwrap();
        let g = linspace(0.0, FRAC_PI_2, 50);
        let p = right_derivative_profile(&sine, &g, &HSchedule::dini_default(FRAC_PI_2)).unwrap();
        for &t in &g {
            assert_abs_diff_eq!(p.eval(t), t.cos(), epsilon = 1e-6);
        }
    }

    #[test]
    fn model_difference_examples() {
        let g = linspace(0.0, FRAC_PI_2, 101);
        let f = FunctionSpec::model(k(1.0), FRAC_PI_2).unwrap();
        let r = model_difference_check(&f, k(1.0), &g, tol()).unwrap();
        assert!(r.passed());
        assert_abs_diff_eq!(r.values["initial-slope"], 1.0, epsilon = 1e-12);
        let f = FunctionSpec::model(k(2.0), FRAC_PI_2).unwrap();
        assert!(model_difference_check(&f, k(1.0), &g, tol()).unwrap().passed());
        let g = linspace(0.0, PI, 201);
        let r = model_difference_check(&counterexample_psi(), k(1.0), &g, tol()).unwrap();
        let c = r.check("difference-nonincreasing").unwrap();
        assert_eq!(c.status, Status::ExpectedPossibleFail);
        assert!(c.witness.unwrap().location > FRAC_PI_2);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn concave_consequence_examples() {
        let kb = (PI / 3.0).powi(2);
        let bump = FunctionSpec::model(k(kb), 3.0).unwrap();
        let r = concave_consequences_check(&bump, k(1.0), ConcaveConsequence::NonnegativeIfEndVanishes, tol()).unwrap();
        assert!(r.passed());

        let sine = FunctionSpec::model(k(1.0), PI).unwrap();
        let r = concave_consequences_check(&sine, k(1.0), ConcaveConsequence::PeakBeforeHalfRadius, tol()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_abs_diff_eq!(r.values["argmax"], FRAC_PI_2, epsilon = 1e-7);
        assert!(r.check("model-up-to-peak").is_some());

        let neg = cf(PI, |t: f64| -t.sin());
        let r =
            concave_consequences_check(&neg, k(1.0), ConcaveConsequence::StrictDecreaseIfNegativeSlope, tol()).unwrap();
        assert!(r.passed());

        let r = concave_consequences_check(&sine, k(1.0), ConcaveConsequence::EqualityPropagates, tol()).unwrap();
        assert!(r.passed());
        assert_abs_diff_eq!(r.values["contact"], PI, epsilon = 1e-12);

        let e = concave_consequences_check(&sine, k(0.0), ConcaveConsequence::PeakBeforeHalfRadius, tol());
        assert!(matches!(e, Err(Error::Hypothesis(_))));
        let e = concave_consequences_check(&sine, k(1.0), ConcaveConsequence::StrictDecreaseIfNegativeSlope, tol());
        assert!(matches!(e, Err(Error::Hypothesis(_))));
    }

    #[test]
    fn admissibility() {
        let g = linspace(0.0, 2.0, 101);
        let f = FunctionSpec::model(k(1.0), 2.0).unwrap();
        let r = admissibility_check(&f, k(0.0), &g, tol());
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
        let r = admissibility_check(&cf(2.0, |t| 2.0 * t), k(0.0), &g, tol());
        assert!(!r.check("unit-initial-slope").unwrap().passed());
        let r = admissibility_check(&f, k(-1.0), &g, tol());
        assert!(r.passed());
        let r = admissibility_check(&FunctionSpec::model(k(-1.0), 2.0).unwrap(), k(0.0), &g, tol());
        assert!(!r.check("ratio-nonincreasing").unwrap().passed());
    }
}
