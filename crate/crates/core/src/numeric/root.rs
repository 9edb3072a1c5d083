use crate::error::{Error, Result};
use crate::Scalar;

/// Termination thresholds for [`bracketed_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions<T> {
    /// Stop once the bracket is narrower than this.
    pub x_tol: T,
    /// Stop once `|f(x)|` is at or below this.
    pub f_tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> RootOptions<T> {
    /// Width tolerance relative to `scale`, residual tolerance `f_tol`.
    pub fn relative(scale: T, f_tol: T) -> Self {
        RootOptions {
            x_tol: T::lit(1e-14) * scale.abs(),
            f_tol,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub residual: T,
    pub iterations: usize,
}

/// Illinois regula falsi with bisection fallback on a sign-changing bracket.
pub fn bracketed_root<T, F>(mut f: F, lo: T, hi: T, opts: &RootOptions<T>) -> Result<Root<T>>
where
    T: Scalar,
    F: FnMut(T) -> T,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() || fa.abs() <= opts.f_tol && fa.abs() <= fb.abs() {
        return Ok(Root {
            x: a,
            residual: fa,
            iterations: 0,
        });
    }
    if fb == T::zero() || fb.abs() <= opts.f_tol {
        return Ok(Root {
            x: b,
            residual: fb,
            iterations: 0,
        });
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NotBracketed {
            lo: a.as_f64(),
            hi: b.as_f64(),
            f_lo: fa.as_f64(),
            f_hi: fb.as_f64(),
        });
    }
    let two = T::lit(2.0);
    // Illinois weights; reset whenever the retained end changes
    let (mut wa, mut wb) = (T::one(), T::one());
    let mut last_side = 0i8;
    let mut width = b - a;
    for it in 1..=opts.max_iter {
        let mid = a + (b - a) / two;
        if b - a <= opts.x_tol || mid <= a || mid >= b {
            return Ok(best(a, fa, b, fb, it));
        }
        let (sa, sb) = (fa * wa, fb * wb);
        let mut x = (a * sb - b * sa) / (sb - sa);
        // bisect when the secant leaves the bracket or stalls the shrinkage
        if !(x > a && x < b) || it % 4 == 0 && b - a > width / two {
            x = mid;
        }
        if it % 4 == 0 {
            width = b - a;
        }
        let fx = f(x);
        if fx == T::zero() || fx.abs() <= opts.f_tol || fx.is_nan() {
            return Ok(Root {
                x,
                residual: fx,
                iterations: it,
            });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            wa = T::one();
            if last_side == 1 {
                wb = wb / two;
            }
            last_side = 1;
        } else {
            b = x;
            fb = fx;
            wb = T::one();
            if last_side == -1 {
                wa = wa / two;
            }
            last_side = -1;
        }
    }
    Ok(best(a, fa, b, fb, opts.max_iter))
}

fn best<T: Scalar>(a: T, fa: T, b: T, fb: T, iterations: usize) -> Root<T> {
    if fa.abs() <= fb.abs() {
        Root {
            x: a,
            residual: fa,
            iterations,
        }
    } else {
        Root {
            x: b,
            residual: fb,
            iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn opts() -> RootOptions<f64> {
        RootOptions::relative(1.0, 0.0)
    }

    #[test]
    fn cosine_root() {
        let r = bracketed_root(f64::cos, 0.0, 3.0, &opts()).unwrap();
        assert_abs_diff_eq!(r.x, std::f64::consts::FRAC_PI_2, epsilon = 1e-14);
        assert!(r.iterations < 60);
    }

    #[test]
    fn exact_endpoint_is_returned_verbatim() {
        let r = bracketed_root(|x: f64| x - 0.7, 0.7, 2.0, &opts()).unwrap();
        assert_eq!(r.x, 0.7);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn flat_tail_converges() {
        // regula falsi without the Illinois correction stalls here
        let r = bracketed_root(|x: f64| x.powi(9) - 1e-9, 0.0, 4.0, &opts()).unwrap();
        assert_abs_diff_eq!(r.x, 0.1, epsilon = 1e-13);
    }

    #[test]
    fn decreasing_function() {
        let r = bracketed_root(|x: f64| 2.0 - x * x, 0.0, 2.0, &opts()).unwrap();
        assert_abs_diff_eq!(r.x, 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn missing_bracket_is_an_error() {
        let e = bracketed_root(|x: f64| x * x + 1.0, -1.0, 1.0, &opts()).unwrap_err();
        assert!(matches!(e, Error::NotBracketed { .. }));
    }

    #[test]
    fn single_precision_terminates() {
        let o = RootOptions::<f32>::relative(1.0, 0.0);
        let r = bracketed_root(|x: f32| x * x - 2.0, 0.0, 2.0, &o).unwrap();
        assert!((r.x - 2f32.sqrt()).abs() < 1e-6);
    }
}
