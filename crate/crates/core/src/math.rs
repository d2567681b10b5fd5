//! Log-space helpers shared by the component and system evaluators.
//!
//! Tail quantities are carried as `ln p` and, where `p` sits next to 1, as
//! `ln(-ln p)` ("nested log"). The nested form keeps full relative precision
//! for `1 - p` long after `p` itself rounds to 1.

use std::f64::consts::LN_2;

/// Below this nested log, `-expm1(-e^l)` and `e^l` agree to the last bit.
const NESTED_LINEAR_CUTOFF: f64 = -700.0;

/// `ln(1 - e^a)` for `a <= 0`.
#[inline]
pub fn log1mexp(a: f64) -> f64 {
    if a > -LN_2 {
        (-a.exp_m1()).ln()
    } else {
        (-a.exp()).ln_1p()
    }
}

/// `ln(1 - p)` given `l = ln(-ln p)`.
///
/// This is the complement of a probability whose log is `-e^l`; it stays
/// accurate when `ln p` is too small in magnitude to be represented.
#[inline]
pub fn log_complement_from_nested(l: f64) -> f64 {
    if l == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if l == f64::INFINITY {
        return 0.0;
    }
    if l < NESTED_LINEAR_CUTOFF {
        // 1 - e^{-u} = u (1 - u/2 + ...) with u = e^l underflowing
        return l;
    }
    log1mexp(-l.exp())
}

/// `ln(-ln(1 - e^a))` for `a <= 0`: nested log of the complement of `e^a`.
#[inline]
pub fn nested_log_of_complement(a: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if a < NESTED_LINEAR_CUTOFF {
        return a;
    }
    (-log1mexp(a)).ln()
}

/// `ln(sum e^{v_i})`, returning `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(values: &mut [f64]) -> f64 {
    // canonical order so that the result is permutation invariant
    values.sort_by(|a, b| a.total_cmp(b));
    let max = match values.last() {
        Some(&m) => m,
        None => return f64::NEG_INFINITY,
    };
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Sum in ascending order so that permutations of the input give the same
/// bits.
pub fn canonical_sum(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    values.iter().sum()
}

/// `x^p` as `e^{p ln x}`, with `0^p = 0` for `p > 0`.
#[inline]
pub fn pow_pos(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        (p * x.ln()).exp()
    }
}

/// Rounding-noise floor when comparing two log values of the given
/// magnitudes.
#[inline]
pub(crate) fn log_noise(a: f64, b: f64) -> f64 {
    let mag = |v: f64| if v.is_finite() { v.abs() } else { 0.0 };
    64.0 * f64::EPSILON * (mag(a) + mag(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log1mexp_both_branches() {
        for a in [-1e-12f64, -0.1, -0.69, -0.7, -5.0] {
            let exact = (-a.exp_m1()).ln();
            let got = log1mexp(a);
            assert!((got - exact).abs() <= 1e-9 * exact.abs().max(1e-300), "{a}");
        }
        let deep = log1mexp(-40.0);
        assert!((deep / -(-40.0f64).exp() - 1.0).abs() < 1e-12);
        // tiny argument: 1 - e^a ~ -a
        assert!((log1mexp(-1e-300) - (1e-300f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn nested_complement_round_trip() {
        for p in [0.1f64, 0.5, 0.9, 0.999_999] {
            let l = (-p.ln()).ln();
            let got = log_complement_from_nested(l).exp();
            assert!((got - (1.0 - p)).abs() < 1e-12, "{p}");
        }
        assert_eq!(log_complement_from_nested(-800.0), -800.0);
        assert_eq!(log_complement_from_nested(f64::NEG_INFINITY), f64::NEG_INFINITY);
    }

    #[test]
    fn nested_of_complement_small_argument() {
        // -ln(1 - e^a) ~ e^a for very negative a
        assert_eq!(nested_log_of_complement(-900.0), -900.0);
        let a = -30.0;
        assert!((nested_log_of_complement(a) - a).abs() < 1e-12);
    }

    #[test]
    fn lse_is_order_free() {
        let mut a = [-3.0, 1.0, -700.0, 0.5];
        let mut b = [0.5, -700.0, 1.0, -3.0];
        assert_eq!(log_sum_exp(&mut a), log_sum_exp(&mut b));
        assert_eq!(log_sum_exp(&mut []), f64::NEG_INFINITY);
    }

    #[test]
    fn pow_pos_zero() {
        assert_eq!(pow_pos(0.0, 2.5), 0.0);
        assert!((pow_pos(2.0, 3.0) - 8.0).abs() < 1e-14);
    }
}
