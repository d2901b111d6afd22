//! One-dimensional maximisation.

/// `1 / phi`, the interval shrink factor per golden-section step.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `x_tol` and returns the better of
/// the two interior probes as `(x, f(x))`. Points where `f` is undefined
/// should evaluate to `f64::NEG_INFINITY`.
pub(crate) fn golden_section_maximize<F>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    // each step shrinks the bracket by INV_PHI, so this bound is never hit
    // for sane tolerances
    for _ in 0..200 {
        if hi - lo <= x_tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }

    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, fx) = golden_section_maximize(|x| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-9);
        // a flat peak only resolves x to about sqrt(f64::EPSILON)
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-15);
    }

    #[test]
    fn monotone_function_runs_to_edge() {
        let (x, _) = golden_section_maximize(|x| -x, 0.0, 0.01, 1e-8);
        assert!(x < 1e-8);
        let (x, _) = golden_section_maximize(|x| x, 0.5, 1.0, 1e-8);
        assert!(x > 1.0 - 1e-8);
    }

    #[test]
    fn undefined_points_are_avoided() {
        let f = |x: f64| {
            if x < 0.2 {
                f64::NEG_INFINITY
            } else {
                -(x - 0.25).powi(2)
            }
        };
        let (x, _) = golden_section_maximize(f, 0.0, 1.0, 1e-9);
        assert!((x - 0.25).abs() < 1e-6);
    }
}
