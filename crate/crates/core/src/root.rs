//! Bracketed root finding for the monotone inversions of the swap engine.

use crate::error::{AmmError, Result};

pub const MAX_ITERATIONS: usize = 200;

/// Solves `f(t) = target` for `f` strictly increasing on `[lo, hi]` with
/// `f(lo) <= target <= f(hi)`.
///
/// `f` returns the value and derivative. Newton steps are taken from `guess`
/// while they stay inside the bracket and shrink; otherwise the bracket is
/// bisected. Iteration stops once the step or the bracket is at the
/// resolution of `f64`.
pub fn solve_increasing<F>(f: F, target: f64, mut lo: f64, mut hi: f64, guess: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    debug_assert!(lo <= hi);
    let mut t = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    let mut last_step = f64::INFINITY;

    for _ in 0..MAX_ITERATIONS {
        let (value, slope) = f(t);
        let residual = value - target;
        if residual == 0.0 {
            return Ok(t);
        }
        if residual < 0.0 {
            lo = t;
        } else {
            hi = t;
        }

        let resolution = 2.0 * f64::EPSILON * t.abs().max(f64::MIN_POSITIVE);
        let newton = t - residual / slope;
        let step = (newton - t).abs();
        let next = if slope.is_finite() && slope > 0.0 && newton > lo && newton < hi && step < 0.5 * last_step {
            last_step = step;
            newton
        } else {
            last_step = hi - lo;
            0.5 * (lo + hi)
        };

        if (next - t).abs() <= resolution || hi - lo <= resolution {
            return Ok(next);
        }
        t = next;
    }
    Err(AmmError::NonConvergence {
        iterations: MAX_ITERATIONS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = solve_increasing(|t| (t * t, 2.0 * t), 2.0, 0.0, 2.0, 1.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 4e-16);
    }

    #[test]
    fn bisects_without_derivative() {
        // A useless derivative forces pure bisection.
        let r = solve_increasing(|t| (t.powi(3), f64::NAN), 0.125, 0.0, 1.0, 0.9).unwrap();
        assert!((r - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tiny_roots_in_wide_bracket() {
        let r = solve_increasing(|t| (t, 1.0), 1e-14, 0.0, 1.0, 0.5).unwrap();
        assert!((r - 1e-14).abs() < 1e-28);
    }

    #[test]
    fn infinite_upper_end() {
        // f(1) = inf, as happens when a reserve would be fully drained.
        let f = |t: f64| (t / (1.0 - t), 1.0 / ((1.0 - t) * (1.0 - t)));
        let r = solve_increasing(f, 3.0, 0.0, 1.0, 0.99).unwrap();
        assert!((r - 0.75).abs() < 1e-15);
    }
}
