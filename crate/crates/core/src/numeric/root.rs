//! Root finding for strictly increasing functions.

use crate::error::{domain, Result};

const MAX_ITER: usize = 400;

/// Finds `x ≥ 0` with `f(x) = target` for a strictly increasing `f` with
/// `f(0) ≤ target`.
///
/// The bracket `[0, 1]` is doubled until `f(hi) ≥ target`, then refined with
/// Newton steps (when `df` is supplied) that fall back to bisection whenever
/// a step would leave the bracket.
pub fn invert_increasing<F, D>(f: F, df: Option<D>, target: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if f(lo) >= target {
        return Ok(lo);
    }
    let mut doublings = 0;
    while f(hi) < target {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 || !hi.is_finite() {
            return Err(domain(format!("target {target} is not attained")));
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let fx = f(x) - target;
        if fx.abs() <= tol * 1e-3 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(x);
        }
        let mut next = 0.5 * (lo + hi);
        if let Some(d) = df.as_ref() {
            let slope = d(x);
            if slope > 0.0 {
                let newton = x - fx / slope;
                if newton > lo && newton < hi {
                    next = newton;
                }
            }
        }
        x = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_cubic_with_and_without_derivative() {
        let f = |x: f64| x * x * x;
        let d = |x: f64| 3.0 * x * x;
        let a = invert_increasing(f, Some(d), 27.0, 1e-12).unwrap();
        let b = invert_increasing(f, None::<fn(f64) -> f64>, 27.0, 1e-12).unwrap();
        assert!((a - 3.0).abs() < 1e-12);
        assert!((b - 3.0).abs() < 1e-12);
    }

    #[test]
    fn target_at_origin() {
        let x = invert_increasing(|x| x, None::<fn(f64) -> f64>, 0.0, 1e-12).unwrap();
        assert_eq!(x, 0.0);
    }

    #[test]
    fn unattainable_target_is_an_error() {
        let r = invert_increasing(|x: f64| 1.0 - (-x).exp(), None::<fn(f64) -> f64>, 2.0, 1e-12);
        assert!(r.is_err());
    }
}
