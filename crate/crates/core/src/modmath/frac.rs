//! Exact base-`b` fixed-point fractions.
//!
//! A `FixedFraction` stores the digit string `0.d1 d2 ... d_{w+1}` most
//! significant first; every operation is integer digit arithmetic, so sums
//! are bit-identical under any association or permutation. That exactness is
//! what makes the parallel term accumulation deterministic.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::workspace::Workspace;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixedFraction {
    base: u64,
    digits: Vec<u64>,
}

impl FixedFraction {
    /// The zero fraction with `digit_count` digits.
    pub fn zero(base: u64, digit_count: usize) -> Self {
        check_base(base);
        assert!(digit_count >= 1);
        FixedFraction { base, digits: vec![0; digit_count] }
    }

    /// Truncation of `u0 / v` to `w + 1` digits: the returned value `t`
    /// satisfies `0 <= u0/v - t < b^-(w+1)`.
    pub fn from_ratio(u0: &BigUint, v: &BigUint, base: u64, w: u64) -> Self {
        Self::from_ratio_in(u0, v, base, w, &Workspace::new())
    }

    /// Instrumented variant of [`FixedFraction::from_ratio`].
    pub fn from_ratio_in(u0: &BigUint, v: &BigUint, base: u64, w: u64, ws: &Workspace) -> Self {
        check_base(base);
        assert!(u0 < v, "numerator must lie in [0, v)");
        let mut digits = Vec::with_capacity(w as usize + 1);
        let mut rem = u0.clone();
        let _guard = ws.hold(v);
        for _ in 0..=w {
            let (q, r) = ws.div_digit(&rem, base, v);
            digits.push(q.to_u64().expect("digit below base"));
            rem = r;
        }
        FixedFraction { base, digits }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    /// Leading digit `d1`, the candidate extracted digit.
    pub fn leading_digit(&self) -> u64 {
        self.digits[0]
    }

    /// Exact digit-wise sum with the integer carry discarded (mod 1).
    pub fn add_mod1(&self, other: &FixedFraction) -> FixedFraction {
        assert_eq!(
            self.base, other.base,
            "contract violation: mismatched fraction bases"
        );
        assert_eq!(
            self.digits.len(),
            other.digits.len(),
            "contract violation: mismatched fraction precision"
        );
        let mut digits = vec![0u64; self.digits.len()];
        let mut carry = 0u64;
        for i in (0..self.digits.len()).rev() {
            let sum = self.digits[i] + other.digits[i] + carry;
            digits[i] = sum % self.base;
            carry = sum / self.base;
        }
        FixedFraction { base: self.base, digits }
    }

    /// Nearest value with `y + 1` digits; ties round away from zero. The
    /// flag reports a wrap to `0.00...0`, i.e. the nearest value was 1.
    pub fn round_to_digits(&self, y: u64) -> (FixedFraction, bool) {
        let keep = y as usize + 1;
        assert!(
            self.digits.len() >= keep,
            "round_to_digits needs at least y + 1 digits"
        );
        let mut digits: Vec<u64> = self.digits[..keep].to_vec();
        let round_up = self
            .digits
            .get(keep)
            .map(|&d| 2 * d >= self.base)
            .unwrap_or(false);
        let mut wrapped = false;
        if round_up {
            let mut i = keep;
            loop {
                if i == 0 {
                    wrapped = true; // carried past the leading digit: value rounds to 1.0
                    break;
                }
                i -= 1;
                if digits[i] + 1 == self.base {
                    digits[i] = 0;
                } else {
                    digits[i] += 1;
                    break;
                }
            }
        }
        (FixedFraction { base: self.base, digits }, wrapped)
    }

    /// Exact rational value (test and oracle helper).
    pub fn to_rational(&self) -> BigRational {
        let mut numer = BigUint::zero();
        for &d in &self.digits {
            numer = numer * self.base + d;
        }
        let denom = BigUint::from(self.base).pow(self.digits.len() as u32);
        BigRational::new(numer.into(), denom.into())
    }
}

fn check_base(base: u64) {
    assert!(base >= 2, "base must be at least 2");
    assert!(base <= 1 << 32, "digit arithmetic needs base <= 2^32");
}
