//! Instrumented arithmetic context for the extraction path.
//!
//! All long-lived big integers on the extraction path are registered with a
//! [`Workspace`] while they are live, and the modular helpers route their
//! transient products through it as well. This gives portable measurements —
//! peak live operand bits, the largest single operand, and a count of
//! arbitrary-precision modular multiplications — without OS-level RSS probes.
//! Oracle code never touches a workspace.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::Zero;

/// Shared, thread-safe accounting for one extraction run.
#[derive(Debug, Default)]
pub struct Workspace {
    live_bits: AtomicU64,
    peak_bits: AtomicU64,
    max_operand_bits: AtomicU64,
    mod_mul_count: AtomicU64,
    coeff_words_live: AtomicU64,
    coeff_words_peak: AtomicU64,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Largest total of simultaneously live tracked bits seen so far.
    pub fn peak_workspace_bits(&self) -> u64 {
        self.peak_bits.load(Ordering::Relaxed)
    }

    /// Largest single tracked operand, in bits.
    pub fn max_operand_bits(&self) -> u64 {
        self.max_operand_bits.load(Ordering::Relaxed)
    }

    /// Number of arbitrary-precision modular multiplications performed.
    pub fn mod_mul_count(&self) -> u64 {
        self.mod_mul_count.load(Ordering::Relaxed)
    }

    /// Peak number of simultaneously live polynomial coefficient words.
    pub fn coeff_words_peak(&self) -> u64 {
        self.coeff_words_peak.load(Ordering::Relaxed)
    }

    pub fn count_mod_mul(&self) {
        self.mod_mul_count.fetch_add(1, Ordering::Relaxed);
    }

    fn bump_peak(&self, live: u64) {
        self.peak_bits.fetch_max(live, Ordering::Relaxed);
    }

    fn note_operand(&self, bits: u64) {
        self.max_operand_bits.fetch_max(bits, Ordering::Relaxed);
    }

    fn acquire(&self, bits: u64) {
        let live = self.live_bits.fetch_add(bits, Ordering::Relaxed) + bits;
        self.bump_peak(live);
        self.note_operand(bits);
    }

    fn release(&self, bits: u64) {
        self.live_bits.fetch_sub(bits, Ordering::Relaxed);
    }

    /// Register `value` as live until the returned guard drops.
    pub fn hold<'ws>(&'ws self, value: &BigUint) -> Held<'ws> {
        let bits = value.bits();
        self.acquire(bits);
        Held { ws: self, bits }
    }

    /// Register a raw bit count (for digit buffers and similar).
    pub fn hold_bits(&self, bits: u64) -> Held<'_> {
        self.acquire(bits);
        Held { ws: self, bits }
    }

    /// Account for a short-lived intermediate of `bits` bits.
    pub fn note_transient(&self, bits: u64) {
        let live = self.live_bits.load(Ordering::Relaxed) + bits;
        self.bump_peak(live);
        self.note_operand(bits);
    }

    /// `(a * b) mod n`, counting the multiplication and its transient product.
    pub fn mul_mod(&self, a: &BigUint, b: &BigUint, n: &BigUint) -> BigUint {
        let product = a * b;
        self.note_transient(product.bits());
        self.count_mod_mul();
        product % n
    }

    /// `(a + b) mod n` for residues `a, b < n`.
    pub fn add_mod(&self, a: &BigUint, b: &BigUint, n: &BigUint) -> BigUint {
        let sum = a + b;
        if sum >= *n {
            sum - n
        } else {
            sum
        }
    }

    /// `(a - b) mod n` for residues `a, b < n`.
    pub fn sub_mod(&self, a: &BigUint, b: &BigUint, n: &BigUint) -> BigUint {
        if a >= b {
            a - b
        } else {
            n - b + a
        }
    }

    /// Quotient digit and remainder of `(rem * base) / divisor`; one counted
    /// division step of the digit loop.
    pub fn div_digit(&self, rem: &BigUint, base: u64, divisor: &BigUint) -> (BigUint, BigUint) {
        use num_integer::Integer;
        let scaled = rem * base;
        self.note_transient(scaled.bits());
        self.count_mod_mul();
        let (q, r) = scaled.div_rem(divisor);
        (q, r)
    }

    pub fn track_coeff_words(&self, words: u64) -> CoeffGuard<'_> {
        let live = self.coeff_words_live.fetch_add(words, Ordering::Relaxed) + words;
        self.coeff_words_peak.fetch_max(live, Ordering::Relaxed);
        CoeffGuard { ws: self, words }
    }
}

/// RAII guard for a tracked big-integer operand.
#[derive(Debug)]
pub struct Held<'ws> {
    ws: &'ws Workspace,
    bits: u64,
}

impl Held<'_> {
    /// Re-register after the underlying value changed size.
    pub fn update(&mut self, value: &BigUint) {
        let bits = value.bits();
        self.ws.release(self.bits);
        self.ws.acquire(bits);
        self.bits = bits;
    }
}

impl Drop for Held<'_> {
    fn drop(&mut self) {
        self.ws.release(self.bits);
    }
}

/// RAII guard for live polynomial coefficient words.
#[derive(Debug)]
pub struct CoeffGuard<'ws> {
    ws: &'ws Workspace,
    words: u64,
}

impl Drop for CoeffGuard<'_> {
    fn drop(&mut self) {
        self.ws.coeff_words_live.fetch_sub(self.words, Ordering::Relaxed);
    }
}

/// Tracked big integers that release their accounting on drop.
#[derive(Debug)]
pub struct Tracked<'ws> {
    value: BigUint,
    guard: Held<'ws>,
}

impl<'ws> Tracked<'ws> {
    pub fn new(ws: &'ws Workspace, value: BigUint) -> Self {
        let guard = ws.hold(&value);
        Tracked { value, guard }
    }

    pub fn zero(ws: &'ws Workspace) -> Self {
        Tracked::new(ws, BigUint::zero())
    }

    pub fn get(&self) -> &BigUint {
        &self.value
    }

    pub fn set(&mut self, value: BigUint) {
        self.value = value;
        self.guard.update(&self.value);
    }

    pub fn into_inner(self) -> BigUint {
        self.value
    }
}
