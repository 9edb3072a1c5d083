use crate::Scalar;

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let d = T::of(n - 1);
            (0..n)
                .map(|i| if i + 1 == n { b } else { a + (b - a) * T::of(i) / d })
                .collect()
        }
    }
}

/// `n` logarithmically spaced points from `a` to `b` inclusive; both positive.
pub fn logspace<T: Scalar>(a: T, b: T, n: usize) -> Vec<T> {
    let (la, lb) = (a.ln(), b.ln());
    let mut v: Vec<T> = linspace(la, lb, n).into_iter().map(T::exp).collect();
    if let Some(first) = v.first_mut() {
        *first = a;
    }
    if n > 1 {
        v[n - 1] = b;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        let g = linspace(0.1, 0.7, 7);
        assert_eq!((g[0], g[6]), (0.1, 0.7));
        let g = logspace(1e-3, 2.5, 64);
        assert_eq!((g[0], g[63]), (1e-3, 2.5));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn degenerate_counts() {
        assert!(linspace(0.0, 1.0, 0).is_empty());
        assert_eq!(linspace(0.3, 1.0, 1), vec![0.3]);
    }
}
