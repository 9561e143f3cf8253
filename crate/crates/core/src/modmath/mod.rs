//! Modular and exact auxiliary arithmetic.
//!
//! Everything the extraction loop leans on: modular powers and inverses, a
//! segmented prime stream with the primorial threshold rule, the on-the-fly
//! CRT accumulator, and exact base-`b` fixed-point fractions. No binary
//! floating point appears anywhere on these paths.

mod crt;
mod frac;
mod primes;

pub use crt::CrtAccumulator;
pub use frac::FixedFraction;
pub use primes::{prime_basis, primes_to_threshold, PrimeBasis, PrimeStream};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::Error;
use crate::workspace::{Tracked, Workspace};

/// `base^exp mod modulus` by square-and-multiply.
pub fn mod_pow(base: &BigUint, exp: u64, modulus: &BigUint) -> BigUint {
    mod_pow_in(base, exp, modulus, &Workspace::new())
}

/// Instrumented variant of [`mod_pow`].
pub fn mod_pow_in(base: &BigUint, exp: u64, modulus: &BigUint, ws: &Workspace) -> BigUint {
    assert!(*modulus >= BigUint::from(2u32), "modulus must be at least 2");
    let mut result = Tracked::new(ws, BigUint::one());
    let mut square = Tracked::new(ws, base % modulus);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result.set(ws.mul_mod(result.get(), square.get(), modulus));
        }
        e >>= 1;
        if e > 0 {
            square.set(ws.mul_mod(square.get(), square.get(), modulus));
        }
    }
    result.into_inner()
}

/// Inverse of `x` modulo the prime `p`.
pub fn mod_inv(x: u64, p: u64) -> Result<u64, Error> {
    assert!(p >= 2);
    let a = x % p;
    if a == 0 {
        return Err(Error::NotInvertible(x, p));
    }
    // extended Euclid on (a, p)
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotInvertible(x, p));
    }
    Ok(old_s.rem_euclid(p as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_pow_examples() {
        let n1000 = BigUint::from(1000u32);
        assert_eq!(mod_pow(&BigUint::from(2u32), 10, &n1000), BigUint::from(24u32));
        assert_eq!(
            mod_pow(&BigUint::from(5u32), 0, &BigUint::from(7u32)),
            BigUint::one()
        );
    }

    #[test]
    fn mod_pow_matches_iterated_multiplication() {
        let modulus = BigUint::from(998_244_353u64);
        let base = BigUint::from(3u32);
        let mut expected = BigUint::one();
        for _ in 0..1000 {
            expected = expected * &base % &modulus;
        }
        assert_eq!(mod_pow(&base, 1000, &modulus), expected);
    }

    #[test]
    fn mod_pow_matches_library_on_random_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let base = BigUint::from(rng.gen::<u64>());
            let exp = rng.gen_range(0u64..1 << 20);
            let modulus = BigUint::from(rng.gen_range(2u64..u64::MAX));
            assert_eq!(
                mod_pow(&base, exp, &modulus),
                base.modpow(&BigUint::from(exp), &modulus)
            );
        }
    }

    #[test]
    fn mod_inv_examples() {
        assert_eq!(mod_inv(3, 7).unwrap(), 5);
        assert_eq!(mod_inv(1, 2).unwrap(), 1);
        let p = 998_244_353u64;
        let inv = mod_inv(10, p).unwrap();
        assert_eq!((inv as u128 * 10) % p as u128, 1);
        assert!(matches!(mod_inv(14, 7), Err(Error::NotInvertible(14, 7))));
    }
}
