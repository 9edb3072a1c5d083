use crate::Scalar;

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    /// Relative to the magnitude of a coarse first estimate.
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_depth: 40,
        }
    }
}

impl QuadOptions {
    /// Near machine precision; used where integrals feed a root finder.
    pub fn precise() -> Self {
        QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 1e-14,
            max_depth: 40,
        }
    }
}

// levels refined unconditionally so a lucky 5-point fit cannot end the recursion
const MIN_DEPTH: u32 = 4;

/// Adaptive Simpson quadrature of `f` over `[a, b]` (oriented).
pub fn integrate<T, F>(f: F, a: T, b: T, opts: &QuadOptions) -> T
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if a == b {
        return T::zero();
    }
    if b < a {
        return -integrate(f, b, a, opts);
    }
    let m = mid(a, b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    let scale = whole.abs().as_f64();
    let tol = T::lit(opts.abs_tol.max(opts.rel_tol * scale));
    let mut q = Simpson {
        f: &f,
        max_depth: opts.max_depth,
    };
    q.step(a, b, fa, fm, fb, whole, tol, 0)
}

struct Simpson<'a, F> {
    f: &'a F,
    max_depth: u32,
}

impl<F> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn step<T: Scalar>(&mut self, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: u32) -> T
    where
        F: Fn(T) -> T,
    {
        let m = mid(a, b);
        let lm = mid(a, m);
        let rm = mid(m, b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let sum = left + right;
        let delta = sum - whole;
        let fifteen = T::lit(15.0);
        let floor = T::lit(64.0) * T::epsilon() * (left.abs() + right.abs());
        let exhausted = depth >= self.max_depth || lm <= a || rm >= b || m <= lm || m >= rm;
        if depth >= MIN_DEPTH && (delta.abs() <= fifteen * tol || delta.abs() <= floor) || exhausted {
            return sum + delta / fifteen;
        }
        let half = tol / T::lit(2.0);
        self.step(a, m, fa, flm, fm, left, half, depth + 1) + self.step(m, b, fm, frm, fb, right, half, depth + 1)
    }
}

#[inline]
fn mid<T: Scalar>(a: T, b: T) -> T {
    a + (b - a) / T::lit(2.0)
}

#[inline]
fn simpson<T: Scalar>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}
