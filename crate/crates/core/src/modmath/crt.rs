//! On-the-fly Chinese Remainder reconstruction.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::mod_inv;
use crate::workspace::Workspace;

/// Running pair `(delta, sum)` of a streaming CRT reconstruction.
///
/// `delta` is fixed up front as the product of all planned primes; each
/// incorporated residue pair `(h_p, p)` adds `((delta/p)^-1 h_p mod p) *
/// delta/p` to the running sum, which keeps `sum = h_q (mod q)` for every
/// incorporated prime `q`.
#[derive(Debug, Clone)]
pub struct CrtAccumulator {
    delta: BigUint,
    sum: BigUint,
    incorporated: BigUint,
    count: u64,
}

impl CrtAccumulator {
    pub fn new(delta: BigUint) -> Self {
        assert!(delta >= BigUint::one(), "delta must be positive");
        CrtAccumulator {
            delta,
            sum: BigUint::zero(),
            incorporated: BigUint::one(),
            count: 0,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn delta(&self) -> &BigUint {
        &self.delta
    }

    /// Incorporate the residue `h_p` modulo the fresh prime `p`.
    pub fn add(&mut self, h_p: u64, p: u64) {
        self.add_in(h_p, p, &Workspace::new());
    }

    /// Instrumented variant of [`CrtAccumulator::add`].
    pub fn add_in(&mut self, h_p: u64, p: u64, ws: &Workspace) {
        let p_big = BigUint::from(p);
        assert!(
            !(&self.incorporated % &p_big).is_zero(),
            "contract violation: prime {p} already incorporated"
        );
        assert!(
            (&self.delta % &p_big).is_zero(),
            "contract violation: {p} does not divide delta"
        );
        let cofactor = &self.delta / &p_big;
        ws.note_transient(cofactor.bits());
        let cofactor_mod_p = (&cofactor % &p_big).to_u64().expect("residue fits u64");
        let inv = mod_inv(cofactor_mod_p, p).expect("distinct primes are coprime");
        let weight = (u128::from(h_p % p) * u128::from(inv) % u128::from(p)) as u64;
        ws.count_mod_mul();
        self.sum += cofactor * weight;
        ws.note_transient(self.sum.bits());
        self.incorporated *= p;
        self.count += 1;
    }

    /// Least absolute residue `r = sum (mod delta)` with
    /// `-delta/2 < r <= delta/2`. All planned primes must be incorporated.
    pub fn finalize(self) -> BigInt {
        assert_eq!(
            self.incorporated, self.delta,
            "contract violation: finalize before all planned primes were incorporated"
        );
        let rem = self.sum % &self.delta;
        if &rem * 2u32 > self.delta {
            BigInt::from(rem) - BigInt::from(self.delta)
        } else {
            BigInt::from(rem)
        }
    }
}
