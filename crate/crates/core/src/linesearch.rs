//! One-dimensional maximization of unimodal functions.

use crate::scalar::Scalar;

const MAX_GOLDEN_ITERATIONS: usize = 300;

/// Golden-section search for the maximizer of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`.
pub fn golden_section_max<T: Scalar>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> T {
    golden_section_max_by(|c, d| f(c) >= f(d), lo, hi, tol)
}

/// Golden-section search driven by a comparison: `left_not_worse(c, d)` must
/// return whether `f(c) >= f(d)` for `c < d`. Lets callers compare through an
/// accurately computed difference instead of two nearly equal values.
pub fn golden_section_max_by<T: Scalar>(
    left_not_worse: impl Fn(T, T) -> bool,
    lo: T,
    hi: T,
    tol: T,
) -> T {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    for _ in 0..MAX_GOLDEN_ITERATIONS {
        if b - a <= tol {
            break;
        }
        if left_not_worse(c, d) {
            b = d;
            d = c;
            c = b - inv_phi * (b - a);
        } else {
            a = c;
            c = d;
            d = a + inv_phi * (b - a);
        }
    }
    (a + b) / T::lit(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let x = golden_section_max(|x: f64| -(x - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn monotone_function_goes_to_boundary() {
        let x = golden_section_max(|x: f64| x, 0.0, 2.0, 1e-9);
        assert!((x - 2.0).abs() < 1e-8);
        let x = golden_section_max(|x: f64| -x, 0.0, 2.0, 1e-9);
        assert!(x.abs() < 1e-8);
    }

    #[test]
    fn comparison_form_matches_value_form() {
        let f = |x: f64| (1.0 + 3.0 * x).ln() - 0.7 * x;
        let a = golden_section_max(f, 0.0, 10.0, 1e-6);
        let b = golden_section_max_by(|c, d| f(c) >= f(d), 0.0, 10.0, 1e-6);
        assert_eq!(a, b);
    }

    #[test]
    fn terminates_when_tolerance_is_unreachable_in_f32() {
        let x = golden_section_max(|x: f32| -(x - 1.5).powi(2), 0.0, 1e6, 1e-12);
        assert!((x - 1.5).abs() < 1.0);
    }
}
