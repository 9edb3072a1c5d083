use crate::Scalar;

/// Neville extrapolation of sampled `(h, g(h))` pairs to `h = 0`.
///
/// Samples should approach zero geometrically; polynomial behaviour in `h`
/// is assumed.
pub fn limit_at_zero<T: Scalar>(samples: &[(T, T)]) -> Option<T> {
    if samples.is_empty() {
        return None;
    }
    let h: Vec<T> = samples.iter().map(|s| s.0).collect();
    let mut p: Vec<T> = samples.iter().map(|s| s.1).collect();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (h[i], h[i + level]);
            p[i] = (hi * p[i + 1] - hj * p[i]) / (hi - hj);
        }
    }
    Some(p[0])
}
