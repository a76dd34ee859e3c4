//! Arithmetic, geometric and logarithmic means of two non-negative reals.
//!
//! All three are symmetric bit-for-bit: arguments are put in canonical
//! order (larger first) before any arithmetic happens.

use thiserror::Error;

/// Relative gap below which [`logarithmic_mean`] returns the arithmetic mean.
///
/// With `d = (p - q) / (p + q)`, `L = A·(1 - d²/3 + O(d⁴))`, so the
/// substitution error is below `1e-17` relative at this threshold.
pub const NEAR_EQUAL_REL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MeanError {
    #[error("logarithmic mean needs strictly positive finite arguments, got ({0}, {1})")]
    NonPositive(f64, f64),
}

#[inline]
fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a >= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// `(a + b) / 2`.
pub fn arithmetic_mean(a: f64, b: f64) -> f64 {
    let (hi, lo) = ordered(a, b);
    0.5 * hi + 0.5 * lo
}

/// `√(ab)`, computed as `exp((ln a + ln b) / 2)` so large arguments do not
/// overflow the product. Returns 0 if either argument is 0.
pub fn geometric_mean(a: f64, b: f64) -> f64 {
    let (hi, lo) = ordered(a, b);
    if lo == 0.0 {
        return 0.0;
    }
    if hi == lo {
        return hi;
    }
    (0.5 * (hi.ln() + lo.ln())).exp()
}

/// The logarithmic mean `(p − q) / (ln p − ln q)`, with `L(p, p) = p`.
pub fn logarithmic_mean(p: f64, q: f64) -> Result<f64, MeanError> {
    if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
        return Err(MeanError::NonPositive(p, q));
    }
    let (hi, lo) = ordered(p, q);
    let diff = hi - lo;
    if diff <= NEAR_EQUAL_REL * hi {
        return Ok(arithmetic_mean(hi, lo));
    }
    // ln(hi/lo) via ln_1p keeps full relative accuracy when hi/lo is close to 1
    let log_ratio = if diff <= lo { (diff / lo).ln_1p() } else { hi.ln() - lo.ln() };
    Ok(diff / log_ratio)
}

/// Logarithmic mean of `exp(lp)` and `exp(lq)`, for arguments known only
/// through their logarithms.
///
/// Equal to `exp(lq)·(e^(lp−lq) − 1)/(lp − lq)`, which is finite whenever
/// the mean itself is representable.
pub fn logarithmic_mean_ln(lp: f64, lq: f64) -> Result<f64, MeanError> {
    if !(lp.is_finite() && lq.is_finite()) {
        return Err(MeanError::NonPositive(lp.exp(), lq.exp()));
    }
    let (hi, lo) = ordered(lp, lq);
    let p = hi.exp();
    let q = lo.exp();
    if p.is_finite() && q > 0.0 {
        return logarithmic_mean(p, q);
    }
    let d = hi - lo;
    Ok((lo + d.exp_m1().ln() - d.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(arithmetic_mean(2.0, 4.0), 3.0);
        assert_eq!(arithmetic_mean(7.25, 7.25), 7.25);
        assert_eq!(arithmetic_mean(0.0, 1.0), 0.5);
    }

    #[test]
    fn geometric_examples() {
        assert!(close(geometric_mean(4.0, 9.0), 6.0, 4.0 * f64::EPSILON));
        assert_eq!(geometric_mean(0.3, 0.3), 0.3);
        assert_eq!(geometric_mean(0.0, 5.0), 0.0);
        assert!(close(geometric_mean(1e300, 1e-300 * 4.0), 2.0, 1e-14));
    }

    #[test]
    fn logarithmic_examples() {
        assert_eq!(logarithmic_mean(2.0, 2.0).unwrap(), 2.0);
        assert!(close(logarithmic_mean(1.0, E).unwrap(), E - 1.0, 1e-15));
        let q = (-1.0f64).exp();
        assert!(close(logarithmic_mean(1.0, q).unwrap(), 1.0 - q, 1e-15));
        assert!(logarithmic_mean(0.0, 1.0).is_err());
        assert!(logarithmic_mean(-1.0, 1.0).is_err());
        assert!(logarithmic_mean(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn near_equal_branch_is_continuous() {
        let p = 3.0;
        for rel in [1e-12, 1e-9, 0.99e-8, 1.01e-8, 1e-7, 1e-6] {
            let q = p * (1.0 + rel);
            let l = logarithmic_mean(p, q).unwrap();
            let a = arithmetic_mean(p, q);
            // L = A (1 - d^2/3), d = (q-p)/(q+p)
            let d = (q - p) / (q + p);
            assert!(close(l, a * (1.0 - d * d / 3.0), 1e-15), "rel {rel}");
        }
    }

    #[test]
    fn log_space_variant_agrees_and_survives_overflow() {
        for (p, q) in [(1.0, E), (0.25, 0.7), (5.0, 5.0)] {
            let direct = logarithmic_mean(p, q).unwrap();
            let via_ln = logarithmic_mean_ln(f64::ln(p), f64::ln(q)).unwrap();
            assert!(close(direct, via_ln, 1e-14));
        }
        // e^712 overflows, L(e^712, e^690) ~ e^708.9 does not
        let v = logarithmic_mean_ln(712.0, 690.0).unwrap();
        let expected = (690.0 + (22.0f64).exp_m1().ln() - 22.0f64.ln()).exp();
        assert!(v.is_finite() && close(v, expected, 1e-14));
    }

    proptest! {
        #[test]
        fn symmetry_is_bitwise(p in 1e-6f64..1e6, q in 1e-6f64..1e6) {
            prop_assert_eq!(logarithmic_mean(p, q).unwrap().to_bits(), logarithmic_mean(q, p).unwrap().to_bits());
            prop_assert_eq!(geometric_mean(p, q).to_bits(), geometric_mean(q, p).to_bits());
            prop_assert_eq!(arithmetic_mean(p, q).to_bits(), arithmetic_mean(q, p).to_bits());
        }

        #[test]
        fn homogeneity(p in 1e-3f64..1e3, q in 1e-3f64..1e3) {
            let base = logarithmic_mean(p, q).unwrap();
            for lambda in [1e-3, 1.0, 1e3] {
                let scaled = logarithmic_mean(lambda * p, lambda * q).unwrap();
                prop_assert!(close(scaled, lambda * base, 1e-12));
            }
        }
    }
}
