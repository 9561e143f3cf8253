//! Integer roots and certified logarithm bounds.
//!
//! Plan validation never touches binary floating point: every inequality
//! involving logarithms is decided from integer bounds `lo <= 2^64 * log2(x)
//! <= hi` computed by shift-and-square with directed truncation. The bounds
//! are two ulps apart, so comparisons away from exact ties are always
//! decidable; exact ties are handled by exact big-integer powering.

use num_bigint::BigUint;
use num_traits::One;

/// Fixed-point scale for logarithm bounds.
pub const LOG_SCALE_BITS: u32 = 64;

/// `floor(cbrt(x))` for `x < 2^126`.
pub fn icbrt(x: u128) -> u64 {
    if x == 0 {
        return 0;
    }
    let mut r = (x as f64).cbrt() as u128;
    // float seed, then correct exactly
    while r > 0 && r.saturating_mul(r).saturating_mul(r) > x {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1).saturating_mul(r + 1) <= x {
        r += 1;
    }
    r as u64
}

/// Bounds `(lo, hi)` with `lo <= 2^64 * log2(x) <= hi` and `hi - lo <= 2`.
pub fn log2_bounds(x: u64) -> (u128, u128) {
    assert!(x >= 1, "log2 of zero");
    if x.is_power_of_two() {
        let e = x.trailing_zeros() as u128;
        let v = e << LOG_SCALE_BITS;
        return (v, v);
    }
    let e = 63 - x.leading_zeros();
    // Mantissa in [1, 2) with 192 fractional bits; truncation error per
    // squaring stays below 2^-190 and doubles at most 64 times, well under
    // one output ulp.
    const FRAC: u32 = 192;
    let mut m = BigUint::from(x) << (FRAC - e);
    let two = BigUint::one() << (FRAC + 1);
    let mut frac: u128 = 0;
    for _ in 0..LOG_SCALE_BITS {
        m = (&m * &m) >> FRAC;
        frac <<= 1;
        if m >= two {
            m >>= 1;
            frac |= 1;
        }
    }
    let lo = ((e as u128) << LOG_SCALE_BITS) | frac;
    (lo, lo + 2)
}

/// Exact `floor(log_b(t))` for integers `t >= 1`, `b >= 2`.
pub fn floor_log_base(t: u64, b: u64) -> u64 {
    debug_assert!(b >= 2 && t >= 1);
    let mut e = 0u64;
    let mut pow = BigUint::one();
    let t_big = BigUint::from(t);
    loop {
        pow *= b;
        if pow > t_big {
            return e;
        }
        e += 1;
    }
}

/// Exact number of base-`b` digits of `n >= 1`.
pub fn digit_count(n: &BigUint, b: u64) -> u64 {
    debug_assert!(b >= 2);
    if b == 2 {
        return n.bits();
    }
    let mut d = 0u64;
    let mut pow = BigUint::one();
    while pow <= *n {
        pow *= b;
        d += 1;
    }
    d
}

/// Digit-count approximation for `a^t` in base `b`, exact up to +-1.
///
/// `a^t` has `floor(t * log_b a) + 1` base-`b` digits; the certified bounds
/// pin the floor to within one, which is far inside the factor-2 slack the
/// extraction plan tolerates.
pub fn power_digit_approx(a: u64, t: u64, b: u64) -> u64 {
    assert!(a >= 2 && b >= 2 && t >= 1);
    let (la_lo, la_hi) = log2_bounds(a);
    let (lb_lo, lb_hi) = log2_bounds(b);
    let num_lo = BigUint::from(t) * BigUint::from(la_lo);
    let num_hi = BigUint::from(t) * BigUint::from(la_hi);
    let d_lo: BigUint = num_lo / BigUint::from(lb_hi);
    let d_hi: BigUint = num_hi / BigUint::from(lb_lo);
    let hi: u64 = u64::try_from(&d_hi).unwrap_or(u64::MAX);
    let _ = d_lo;
    hi + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn icbrt_exact_boundaries() {
        assert_eq!(icbrt(0), 0);
        assert_eq!(icbrt(1), 1);
        assert_eq!(icbrt(7), 1);
        assert_eq!(icbrt(8), 2);
        assert_eq!(icbrt(26), 2);
        assert_eq!(icbrt(27), 3);
        let big = 123_456_789u128;
        let r = icbrt(big) as u128;
        assert!(r * r * r <= big && (r + 1) * (r + 1) * (r + 1) > big);
    }

    #[test]
    fn log2_bounds_brackets_true_value() {
        for &x in &[2u64, 3, 5, 7, 10, 36, 1000, 998_244_353, u64::MAX] {
            let (lo, hi) = log2_bounds(x);
            let truth = (x as f64).log2();
            let lo_f = lo as f64 / 2f64.powi(64);
            let hi_f = hi as f64 / 2f64.powi(64);
            assert!(lo_f <= truth + 1e-12, "lo too high for {x}");
            assert!(hi_f >= truth - 1e-12, "hi too low for {x}");
            assert!(hi - lo <= 2);
        }
        assert_eq!(log2_bounds(8), (3 << 64, 3 << 64));
    }

    #[test]
    fn floor_log_matches_definition() {
        assert_eq!(floor_log_base(1, 10), 0);
        assert_eq!(floor_log_base(9, 10), 0);
        assert_eq!(floor_log_base(10, 10), 1);
        assert_eq!(floor_log_base(999, 10), 2);
        assert_eq!(floor_log_base(5, 2), 2);
    }

    #[test]
    fn digit_counts() {
        assert_eq!(digit_count(&BigUint::from(1024u32), 10), 4);
        assert_eq!(digit_count(&BigUint::from(1u32), 2), 1);
        assert_eq!(digit_count(&BigUint::from(999u32), 10), 3);
        assert_eq!(digit_count(&BigUint::from(1000u32), 10), 4);
    }

    #[test]
    fn power_digit_approx_matches_exact_count() {
        for &(a, t, b) in &[(2u64, 10u64, 10u64), (2, 100, 10), (3, 50, 16), (10, 100, 10)] {
            let exact = digit_count(&BigUint::from(a).pow(t as u32), b);
            let approx = power_digit_approx(a, t, b);
            assert!(
                approx == exact || approx == exact + 1 || approx + 1 == exact,
                "a={a} t={t} b={b}: approx {approx} vs exact {exact}"
            );
            let ratio = approx.to_f64().unwrap() / exact.to_f64().unwrap();
            assert!(ratio > 0.5 && ratio < 2.0);
        }
    }
}
