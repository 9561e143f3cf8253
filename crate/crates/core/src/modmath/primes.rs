//! Segmented prime stream and the primorial threshold rule.

use num_bigint::BigUint;
use num_traits::One;

const SEGMENT: u64 = 1 << 15;

/// Increasing stream of primes from a segmented sieve.
///
/// Single-consumer: workers that need their own pass over the primes create
/// independent streams. The exact running product is maintained only when
/// requested, since it is what the primorial threshold rule consumes; the
/// log-domain tracker is always on and is used for nothing finer than
/// presizing decisions.
pub struct PrimeStream {
    bound: Option<u64>,
    base: Vec<u64>,
    seg_lo: u64,
    flags: Vec<bool>,
    idx: usize,
    last: Option<u64>,
    track_product: bool,
    product: BigUint,
    log2_product: f64,
}

impl PrimeStream {
    /// Unbounded stream starting at 2.
    pub fn new() -> Self {
        Self::with_bound(None, false)
    }

    /// Stream that emits exactly the primes `<= bound`.
    pub fn up_to(bound: u64) -> Self {
        Self::with_bound(Some(bound), false)
    }

    /// Unbounded stream that also maintains the exact primorial.
    pub fn tracking_product() -> Self {
        Self::with_bound(None, true)
    }

    fn with_bound(bound: Option<u64>, track_product: bool) -> Self {
        PrimeStream {
            bound,
            base: Vec::new(),
            seg_lo: 0,
            flags: Vec::new(),
            idx: 0,
            last: None,
            track_product,
            product: BigUint::one(),
            log2_product: 0.0,
        }
    }

    pub fn last_prime(&self) -> Option<u64> {
        self.last
    }

    /// Exact product of all primes emitted so far (1 until tracking is on).
    pub fn product_so_far(&self) -> &BigUint {
        &self.product
    }

    pub fn log2_product(&self) -> f64 {
        self.log2_product
    }

    fn extend_base(&mut self, limit: u64) {
        // simple sieve for the base primes; limit stays near sqrt(segment end)
        let limit = limit.max(3);
        let mut is_comp = vec![false; (limit + 1) as usize];
        self.base.clear();
        let mut i = 2u64;
        while i <= limit {
            if !is_comp[i as usize] {
                self.base.push(i);
                let mut j = i * i;
                while j <= limit {
                    is_comp[j as usize] = true;
                    j += i;
                }
            }
            i += 1;
        }
    }

    fn fill_segment(&mut self) {
        let lo = if self.seg_lo == 0 { 2 } else { self.seg_lo };
        let hi = lo + SEGMENT;
        let sqrt_hi = (hi as f64).sqrt() as u64 + 2;
        if self.base.last().copied().unwrap_or(0) < sqrt_hi {
            self.extend_base(sqrt_hi);
        }
        self.seg_lo = lo;
        self.flags.clear();
        self.flags.resize(SEGMENT as usize, false);
        for &p in &self.base {
            if p * p >= hi {
                break;
            }
            let mut start = p * p;
            if start < lo {
                start = lo.div_ceil(p) * p;
            }
            let mut j = start;
            while j < hi {
                if j != p {
                    self.flags[(j - lo) as usize] = true;
                }
                j += p;
            }
        }
        self.idx = 0;
    }
}

impl Default for PrimeStream {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.flags.is_empty() || self.idx >= self.flags.len() {
                let next_lo = if self.seg_lo == 0 { 2 } else { self.seg_lo + SEGMENT };
                if let Some(bound) = self.bound {
                    if next_lo > bound {
                        return None;
                    }
                }
                self.seg_lo = next_lo;
                self.fill_segment();
            }
            while self.idx < self.flags.len() {
                let candidate = self.seg_lo + self.idx as u64;
                self.idx += 1;
                if self.flags[self.idx - 1] || candidate < 2 {
                    continue;
                }
                if let Some(bound) = self.bound {
                    if candidate > bound {
                        return None;
                    }
                }
                self.last = Some(candidate);
                if self.track_product {
                    self.product *= candidate;
                }
                self.log2_product += (candidate as f64).log2();
                return Some(candidate);
            }
        }
    }
}

/// Least `P` whose primorial reaches `2^(T+1) * T!`, plus a stream that
/// re-emits exactly the primes `<= P`.
///
/// The threshold guarantees that the product of the primes exceeds twice the
/// magnitude of any coefficient the CRT has to pin down. The comparison is
/// exact integer arithmetic throughout.
pub fn primes_to_threshold(t_terms: u64) -> (u64, PrimeStream) {
    assert!(t_terms >= 1);
    let mut threshold = BigUint::one() << (t_terms + 1);
    for i in 2..=t_terms {
        threshold *= i;
    }
    let mut stream = PrimeStream::tracking_product();
    loop {
        let p = stream.next().expect("prime stream is unbounded");
        if *stream.product_so_far() >= threshold {
            return (p, PrimeStream::up_to(p));
        }
    }
}

/// The prime set and exact primorial for one coefficient computation.
pub struct PrimeBasis {
    pub p_limit: u64,
    pub delta: BigUint,
    pub primes: Vec<u64>,
}

/// Materialized form of [`primes_to_threshold`] for callers that sweep the
/// same primes once per term.
pub fn prime_basis(t_terms: u64) -> PrimeBasis {
    let (p_limit, stream) = primes_to_threshold(t_terms);
    let mut delta = BigUint::one();
    let primes: Vec<u64> = stream.collect();
    for &p in &primes {
        delta *= p;
    }
    PrimeBasis { p_limit, delta, primes }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_sieve(limit: usize) -> Vec<u64> {
        let mut comp = vec![false; limit + 1];
        let mut out = Vec::new();
        for i in 2..=limit {
            if !comp[i] {
                out.push(i as u64);
                let mut j = i * i;
                while j <= limit {
                    comp[j] = true;
                    j += i;
                }
            }
        }
        out
    }

    #[test]
    fn stream_matches_direct_sieve_to_a_million() {
        let expected = direct_sieve(1_000_000);
        let got: Vec<u64> = PrimeStream::new().take_while(|&p| p <= 1_000_000).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn bounded_stream_stops_at_bound() {
        let got: Vec<u64> = PrimeStream::up_to(11).collect();
        assert_eq!(got, vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn threshold_examples() {
        let (p, stream) = primes_to_threshold(1);
        assert_eq!(p, 3);
        assert_eq!(stream.collect::<Vec<_>>(), vec![2, 3]);

        let (p, _) = primes_to_threshold(2);
        assert_eq!(p, 5);

        let (p, stream) = primes_to_threshold(4);
        assert_eq!(p, 11);
        assert_eq!(stream.collect::<Vec<_>>(), vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn threshold_is_tight_for_all_small_t() {
        for t in 1u64..=200 {
            let mut threshold = BigUint::one() << (t + 1);
            for i in 2..=t {
                threshold *= i;
            }
            let basis = prime_basis(t);
            assert!(basis.delta >= threshold, "T={t}: primorial below threshold");
            let without_last = &basis.delta / basis.primes.last().unwrap();
            assert!(
                without_last < threshold,
                "T={t}: dropping the last prime should dip below the threshold"
            );
            assert_eq!(basis.p_limit, *basis.primes.last().unwrap());
        }
    }

    #[test]
    fn product_tracking_is_exact() {
        let mut stream = PrimeStream::tracking_product();
        let mut expected = BigUint::one();
        for _ in 0..100 {
            let p = stream.next().unwrap();
            expected *= p;
        }
        assert_eq!(*stream.product_so_far(), expected);
        assert!((stream.log2_product() - expected.bits() as f64).abs() < 2.0);
    }
}
