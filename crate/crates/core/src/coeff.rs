//! Exact coefficients of `x^(k-1)` in `prod_{h != j, h <= T} (x - h)`.
//!
//! The coefficients of that product grow like `T! 2^T`, so the full integer
//! polynomial is never formed. Instead the product is expanded modulo one
//! small prime at a time (a divide-and-conquer tree that keeps one partial
//! product per level), only the wanted coefficient survives each pass, and a
//! streaming CRT over all primes up to the primorial threshold reassembles
//! the exact signed value. Peak storage is a few `T`-word vectors per prime
//! plus the primorial itself.
//!
//! A DFT-style alternative (evaluate the product at `T`-th roots of unity
//! and take one inverse-transform coordinate) was considered and rejected:
//! each evaluation would itself need on the order of `T` digits of
//! precision, so holding the evaluations costs `T^2` bits of memory, which
//! is exactly the blow-up this module exists to avoid.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Error;
use crate::modmath::{prime_basis, CrtAccumulator, PrimeBasis};
use crate::workspace::Workspace;

/// Desk-scale guard for the direct expansion oracle.
pub const DIRECT_EXPANSION_MAX_TERMS: u64 = 64;

/// Dense polynomial over `Z/pZ`, constant coefficient first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyModP {
    pub prime: u64,
    pub coeffs: Vec<u64>,
}

impl PolyModP {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, power: usize) -> u64 {
        self.coeffs.get(power).copied().unwrap_or(0)
    }
}

fn mul_mod_p(a: &[u64], b: &[u64], p: u64, ws: &Workspace) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    let _guard = ws.track_coeff_words(out.len() as u64);
    let p128 = u128::from(p);
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let ai128 = u128::from(ai);
        for (j, &bj) in b.iter().enumerate() {
            let cur = u128::from(out[i + j]);
            out[i + j] = ((cur + ai128 * u128::from(bj)) % p128) as u64;
        }
    }
    out
}

fn tree_product(roots: &[u64], p: u64, ws: &Workspace) -> Vec<u64> {
    match roots.len() {
        0 => vec![1],
        1 => {
            let r = roots[0] % p;
            vec![if r == 0 { 0 } else { p - r }, 1 % p]
        }
        len => {
            let mid = len / 2;
            let left = tree_product(&roots[..mid], p, ws);
            let _left_guard = ws.track_coeff_words(left.len() as u64);
            let right = tree_product(&roots[mid..], p, ws);
            let _right_guard = ws.track_coeff_words(right.len() as u64);
            mul_mod_p(&left, &right, p, ws)
        }
    }
}

/// Coefficients of `prod_{h != j} (x - h) mod p` via the product tree.
pub fn product_tree_mod_p(t_terms: u64, j: u64, p: u64) -> PolyModP {
    product_tree_mod_p_in(t_terms, j, p, &Workspace::new())
}

/// Instrumented variant of [`product_tree_mod_p`].
pub fn product_tree_mod_p_in(t_terms: u64, j: u64, p: u64, ws: &Workspace) -> PolyModP {
    assert!(t_terms >= 1 && (1..=t_terms).contains(&j), "need 1 <= j <= T");
    assert!(p >= 2);
    let roots: Vec<u64> = (1..=t_terms).filter(|&h| h != j).collect();
    let coeffs = tree_product(&roots, p, ws);
    PolyModP { prime: p, coeffs }
}

/// Exact coefficient of `x^(k-1)` in `prod_{h != j} (x - h)` by per-prime
/// product trees and streaming CRT.
pub fn coeff_crt(t_terms: u64, k: u64, j: u64) -> BigInt {
    let ws = Workspace::new();
    let basis = prime_basis(t_terms);
    coeff_crt_with_basis(t_terms, k, j, &basis, &ws)
}

/// [`coeff_crt`] against a prepared prime basis, so a caller sweeping many
/// `j` values pays for the sieve and the primorial once.
pub fn coeff_crt_with_basis(
    t_terms: u64,
    k: u64,
    j: u64,
    basis: &PrimeBasis,
    ws: &Workspace,
) -> BigInt {
    assert!((1..=t_terms).contains(&k), "need 1 <= k <= T");
    assert!((1..=t_terms).contains(&j), "need 1 <= j <= T");
    let _delta_guard = ws.hold(&basis.delta);
    let mut acc = CrtAccumulator::new(basis.delta.clone());
    for &p in &basis.primes {
        let poly = product_tree_mod_p_in(t_terms, j, p, ws);
        let residue = poly.coeff(k as usize - 1);
        // only the single wanted coefficient survives the per-prime pass
        drop(poly);
        acc.add_in(residue, p, ws);
    }
    let value = acc.finalize();
    debug_assert!(value.magnitude() * 2u32 < basis.delta);
    value
}

/// Direct expansion oracle with exact integer coefficients. Desk scale only.
pub fn coeff_direct(t_terms: u64, k: u64, j: u64) -> Result<BigInt, Error> {
    if t_terms > DIRECT_EXPANSION_MAX_TERMS {
        return Err(Error::GuardExceeded(format!(
            "coeff_direct supports T <= {DIRECT_EXPANSION_MAX_TERMS}, got {t_terms}"
        )));
    }
    assert!((1..=t_terms).contains(&k), "need 1 <= k <= T");
    assert!((1..=t_terms).contains(&j), "need 1 <= j <= T");
    let coeffs = expand_direct(t_terms, j);
    Ok(coeffs[k as usize - 1].clone())
}

pub(crate) fn expand_direct(t_terms: u64, j: u64) -> Vec<BigInt> {
    let mut coeffs: Vec<BigInt> = vec![BigInt::one()];
    for h in (1..=t_terms).filter(|&h| h != j) {
        let h_int = BigInt::from(h);
        let mut next = vec![BigInt::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * &h_int;
        }
        coeffs = next;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use num_traits::Signed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tree_examples() {
        // (x-1)(x-3) = x^2 - 4x + 3, and -4 = 3 mod 7
        let poly = product_tree_mod_p(3, 2, 7);
        assert_eq!(poly.coeffs, vec![3, 3, 1]);

        // single factor x - 2 mod 5
        let poly = product_tree_mod_p(2, 1, 5);
        assert_eq!(poly.coeffs, vec![3, 1]);
    }

    #[test]
    fn tree_matches_direct_expansion_mod_p() {
        let poly = product_tree_mod_p(5, 5, 101);
        let direct = expand_direct(5, 5);
        let reduced: Vec<u64> = direct
            .iter()
            .map(|c| {
                let m = c.mod_floor(&BigInt::from(101));
                u64::try_from(m.magnitude()).unwrap()
            })
            .collect();
        assert_eq!(poly.coeffs, reduced);
    }

    #[test]
    fn crt_examples() {
        assert_eq!(coeff_crt(3, 2, 2), BigInt::from(-4));
        assert_eq!(coeff_crt(3, 3, 1), BigInt::one());
        assert_eq!(coeff_crt(3, 1, 1), BigInt::from(6));
    }

    #[test]
    fn crt_matches_direct_for_small_t() {
        for t_terms in 1u64..=12 {
            let basis = prime_basis(t_terms);
            let ws = Workspace::new();
            for j in 1..=t_terms {
                for k in 1..=t_terms {
                    assert_eq!(
                        coeff_crt_with_basis(t_terms, k, j, &basis, &ws),
                        coeff_direct(t_terms, k, j).unwrap(),
                        "T={t_terms} k={k} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn leading_coefficient_is_monic() {
        for t_terms in [1u64, 2, 5, 9] {
            for j in 1..=t_terms {
                assert_eq!(coeff_crt(t_terms, t_terms, j), BigInt::one());
            }
        }
    }

    #[test]
    fn coefficients_respect_factorial_bound() {
        for t_terms in 1u64..=16 {
            let mut bound = BigInt::one() << t_terms;
            for i in 2..=t_terms {
                bound *= i;
            }
            for j in 1..=t_terms {
                let coeffs = expand_direct(t_terms, j);
                for c in &coeffs {
                    assert!(c.abs() <= bound, "T={t_terms} j={j}: {c} exceeds T! 2^T");
                }
            }
        }
    }

    #[test]
    fn constant_term_matches_closed_form() {
        // prod_{h != j} (0 - h) = (-1)^(T-1) T! / j
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let t_terms = 9u64;
        let mut factorial = BigInt::one();
        for i in 2..=t_terms {
            factorial *= i;
        }
        for _ in 0..20 {
            let p = loop {
                let candidate = rng.gen_range(100u64..100_000);
                if (2..candidate).take_while(|d| d * d <= candidate).all(|d| candidate % d != 0) {
                    break candidate;
                }
            };
            let j = rng.gen_range(1..=t_terms);
            let expected_int = {
                let value = &factorial / BigInt::from(j);
                if (t_terms - 1) % 2 == 1 {
                    -value
                } else {
                    value
                }
            };
            let expected = expected_int.mod_floor(&BigInt::from(p));
            let poly = product_tree_mod_p(t_terms, j, p);
            assert_eq!(BigInt::from(poly.coeff(0)), expected, "p={p} j={j}");
        }
    }

    #[test]
    fn guard_rejects_large_direct_expansion() {
        assert!(matches!(
            coeff_direct(65, 1, 1),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn per_prime_tree_memory_stays_linear() {
        for t_terms in [33u64, 100, 257] {
            let ws = Workspace::new();
            let poly = product_tree_mod_p_in(t_terms, 1, 99_991, &ws);
            assert_eq!(poly.coeffs.len() as u64, t_terms);
            assert!(
                ws.coeff_words_peak() <= 4 * t_terms,
                "T={t_terms}: peak {} words exceeds 4T",
                ws.coeff_words_peak()
            );
        }
    }

    #[test]
    fn full_crt_sweep_holds_one_tree_at_a_time() {
        // the per-prime vector is dropped before the next prime starts, so
        // the whole coefficient computation peaks like a single tree
        let t_terms = 96u64;
        let basis = prime_basis(t_terms);
        let ws = Workspace::new();
        let _ = coeff_crt_with_basis(t_terms, t_terms / 2, 3, &basis, &ws);
        assert!(
            ws.coeff_words_peak() <= 4 * t_terms,
            "peak {} words exceeds 4T across the prime sweep",
            ws.coeff_words_peak()
        );
    }

    #[test]
    fn coefficient_signs_alternate() {
        // every coefficient is +-1 times an elementary symmetric function of
        // positive integers, so signs alternate and none vanish
        for t_terms in 2u64..=10 {
            for j in 1..=t_terms {
                let coeffs = expand_direct(t_terms, j);
                for (i, c) in coeffs.iter().enumerate() {
                    assert!(!c.is_zero());
                    let expect_negative = (coeffs.len() - 1 - i) % 2 == 1;
                    assert_eq!(c.is_negative(), expect_negative, "T={t_terms} j={j} i={i}");
                }
            }
        }
    }
}
