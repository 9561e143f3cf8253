//! End-to-end digit extraction.
//!
//! With the plan fixed, the target fraction splits into `T` terms
//!
//! ```text
//! gamma_j = b^shift * (-1)^(T-j) * n * a^r * H_j
//!           / ((j-1)! (T-j)! (a^S - j))
//! ```
//!
//! whose fractional parts are computable from residues: reduce everything
//! modulo the per-term denominator `v`, divide out to `w + 1` exact base-`b`
//! digits, and accumulate mod 1. The term loop is embarrassingly parallel
//! and, because the accumulation is exact digit arithmetic, the result is
//! bit-identical for every worker count and schedule.

mod plan;

pub use plan::{
    make_plan, make_plan_general, make_plan_general_with_caps, make_plan_with_caps,
    ExtractionPlan, LogBound, PlanCaps,
};

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;

use crate::coeff::coeff_crt_with_basis;
use crate::modmath::{mod_pow_in, prime_basis, FixedFraction, PrimeBasis};
use crate::slp::SlpProgram;
use crate::workspace::{Tracked, Workspace};

/// Level-`w` approximation to the fractional part of one term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermResult {
    pub term_index: u64,
    pub approx: FixedFraction,
}

/// Everything a digit query reports.
#[derive(Debug, Clone)]
pub struct DigitReport {
    /// The level-`y` approximation, `y + 1` base-`b` digits.
    pub gamma: FixedFraction,
    /// Leading digit of `gamma` — the extracted digit absent ambiguity.
    pub inferred_digit: u64,
    /// Set when `gamma` sits within `b^-y` of a leading-digit boundary, in
    /// which case the true digit may differ by one.
    pub ambiguous: bool,
    /// Set when rounding wrapped `gamma` past 1.
    pub wrapped: bool,
    pub stats: RunStats,
}

/// Resource statistics for one extraction run.
#[derive(Debug, Clone, Default)]
pub struct RunStats {
    pub split: u64,
    pub terms: u64,
    pub layer: u64,
    pub prime_limit: u64,
    pub prime_count: u64,
    pub term_count: u64,
    pub max_operand_bits: u64,
    pub peak_workspace_bits: u64,
    pub mod_mul_count: u64,
    pub elapsed: Duration,
    pub workers: u64,
}

/// Incremental tracker for `(j-1)! (T-j)!` along a contiguous `j` range.
struct FactTracker<'ws> {
    value: Tracked<'ws>,
    term_index: u64,
    terms: u64,
}

impl<'ws> FactTracker<'ws> {
    fn start(terms: u64, first_index: u64, ws: &'ws Workspace) -> Self {
        let mut value = BigUint::one();
        for i in 2..first_index {
            value *= i;
        }
        for i in 2..=(terms - first_index) {
            value *= i;
        }
        FactTracker { value: Tracked::new(ws, value), term_index: first_index, terms }
    }

    /// Step `j -> j+1`: multiply by `j`, divide by `T - j` (exact).
    fn advance(&mut self) {
        let j = self.term_index;
        debug_assert!(j < self.terms);
        let next = (self.value.get() * j) / (self.terms - j);
        self.value.set(next);
        self.term_index += 1;
    }

    fn current(&self) -> &BigUint {
        self.value.get()
    }
}

fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        1
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

fn term_fraction(
    plan: &ExtractionPlan,
    prog: &SlpProgram,
    term_index: u64,
    factorials: &BigUint,
    basis: &PrimeBasis,
    radix_pow_split: &BigUint,
    ws: &Workspace,
) -> FixedFraction {
    let terms = plan.terms();
    let base = plan.base();
    let precision = plan.precision();

    // v = (j-1)! (T-j)! (a^S - j)
    let q = radix_pow_split - term_index;
    let q_guard = ws.hold(&q);
    let modulus = factorials * &q;
    drop(q_guard);
    let modulus_guard = ws.hold(&modulus);

    if modulus.is_one() {
        // everything is congruent to 0; the term contributes nothing
        return FixedFraction::zero(base, precision as usize + 1);
    }

    // H = coefficient of x^(k-1) in prod_{h != j} (x - h), sign-folded with
    // (-1)^(T-j)
    let coefficient = coeff_crt_with_basis(terms, plan.layer(), term_index, basis, ws);
    let signed = if (terms - term_index) % 2 == 1 { -coefficient } else { coefficient };
    let coeff_residue = signed
        .mod_floor(&BigInt::from(modulus.clone()))
        .to_biguint()
        .expect("mod_floor of a positive modulus is nonnegative");
    let _coeff_guard = ws.hold(&coeff_residue);

    let mut residue = Tracked::new(ws, prog.eval_mod_in(&modulus, ws));
    let radix_pow_offset = mod_pow_in(&BigUint::from(plan.radix()), plan.offset(), &modulus, ws);
    let offset_guard = ws.hold(&radix_pow_offset);
    residue.set(ws.mul_mod(residue.get(), &radix_pow_offset, &modulus));
    drop(offset_guard);
    residue.set(ws.mul_mod(residue.get(), &coeff_residue, &modulus));

    // u0 = b^shift * u (mod v); {b^shift u / v} = u0 / v
    let base_pow_shift = mod_pow_in(&BigUint::from(base), plan.shift(), &modulus, ws);
    let shift_guard = ws.hold(&base_pow_shift);
    residue.set(ws.mul_mod(residue.get(), &base_pow_shift, &modulus));
    drop(shift_guard);

    let tau = FixedFraction::from_ratio_in(residue.get(), &modulus, base, precision, ws);
    drop(residue);
    drop(modulus_guard);
    tau
}

/// Level-`w` approximation to the fractional part of term `term_index`.
pub fn compute_term(plan: &ExtractionPlan, prog: &SlpProgram, term_index: u64) -> TermResult {
    assert!(!plan.is_zero_shortcut(), "zero-shortcut plans have no terms");
    assert!(
        (1..=plan.terms()).contains(&term_index),
        "term index out of range"
    );
    let ws = Workspace::new();
    let basis = prime_basis(plan.terms());
    let radix_pow_split = BigUint::from(plan.radix()).pow(plan.split() as u32);
    let fact = FactTracker::start(plan.terms(), term_index, &ws);
    let approx = term_fraction(plan, prog, term_index, fact.current(), &basis, &radix_pow_split, &ws);
    TermResult { term_index, approx }
}

/// Contiguous near-equal partition of `1..=terms` into `parts` ranges.
fn partition_terms(terms: u64, parts: u64) -> Vec<(u64, u64)> {
    let parts = parts.clamp(1, terms);
    let chunk = terms / parts;
    let extra = terms % parts;
    let mut ranges = Vec::with_capacity(parts as usize);
    let mut start = 1;
    for i in 0..parts {
        let len = chunk + u64::from(i < extra);
        ranges.push((start, start + len - 1));
        start += len;
    }
    ranges
}

/// Run the full term loop and round to the reporting precision.
///
/// ```
/// use slpdigit::extract::{extract_digits, make_plan};
/// use slpdigit::slp::SlpProgram;
///
/// // the second decimal digit of 2^10 = 1024, counted from the right
/// let prog = SlpProgram::power(2, 10);
/// let plan = make_plan(10, 2, 2, 4).unwrap();
/// let report = extract_digits(&plan, &prog, 1);
/// assert_eq!(report.inferred_digit, 2);
/// ```
pub fn extract_digits(plan: &ExtractionPlan, prog: &SlpProgram, workers: u64) -> DigitReport {
    extract_digits_in(plan, prog, workers, &Workspace::new())
}

/// Instrumented variant of [`extract_digits`].
pub fn extract_digits_in(
    plan: &ExtractionPlan,
    prog: &SlpProgram,
    workers: u64,
    ws: &Workspace,
) -> DigitReport {
    let base = plan.base();
    let level = plan.level();

    if plan.is_zero_shortcut() {
        let gamma = FixedFraction::zero(base, level as usize + 1);
        return DigitReport {
            gamma,
            inferred_digit: 0,
            // the requested digit lies beyond the value; it is 0 for certain
            ambiguous: false,
            wrapped: false,
            stats: RunStats::default(),
        };
    }

    let started = Instant::now();
    let terms = plan.terms();
    let precision = plan.precision();

    let basis = prime_basis(terms);
    let _delta_guard = ws.hold(&basis.delta);
    let radix_pow_split = BigUint::from(plan.radix()).pow(plan.split() as u32);
    let _pow_guard = ws.hold(&radix_pow_split);

    let worker_count = workers.clamp(1, terms);
    let ranges = partition_terms(terms, worker_count);

    let partials: Vec<FixedFraction> = std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(first, last)| {
                let basis = &basis;
                let radix_pow_split = &radix_pow_split;
                scope.spawn(move || {
                    let _buf_guard =
                        ws.hold_bits(2 * (precision + 1) * ceil_log2(base));
                    let mut sum = FixedFraction::zero(base, precision as usize + 1);
                    let mut fact = FactTracker::start(terms, first, ws);
                    for j in first..=last {
                        while fact.term_index < j {
                            fact.advance();
                        }
                        let tau =
                            term_fraction(plan, prog, j, fact.current(), basis, radix_pow_split, ws);
                        sum = sum.add_mod1(&tau);
                    }
                    sum
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    let mut sigma = FixedFraction::zero(base, precision as usize + 1);
    for part in &partials {
        sigma = sigma.add_mod1(part);
    }
    let (gamma, wrapped) = sigma.round_to_digits(level);
    let (inferred_digit, ambiguous) = infer_digit(&gamma, level);

    // memory envelope: the largest single operand stays within
    // c (S + T) log2(scale) bits, c = 4 calibrated at small sizes
    let scale = level
        .saturating_add(prog.length())
        .saturating_add(plan.split())
        .saturating_add(terms)
        .saturating_add(plan.radix())
        .saturating_add(base);
    let envelope = 4 * (plan.split() + terms) * ceil_log2(scale);
    assert!(
        ws.max_operand_bits() <= envelope,
        "operand envelope exceeded: {} bits > {envelope}",
        ws.max_operand_bits()
    );

    DigitReport {
        gamma,
        inferred_digit,
        ambiguous,
        wrapped,
        stats: RunStats {
            split: plan.split(),
            terms,
            layer: plan.layer(),
            prime_limit: basis.p_limit,
            prime_count: basis.primes.len() as u64,
            term_count: terms,
            max_operand_bits: ws.max_operand_bits(),
            peak_workspace_bits: ws.peak_workspace_bits(),
            mod_mul_count: ws.mod_mul_count(),
            elapsed: started.elapsed(),
            workers: worker_count,
        },
    }
}

/// Leading digit of `gamma` plus the boundary-ambiguity flag.
///
/// The flag is set exactly when `gamma` lies within `b^-y` (mod 1) of a
/// multiple of `1/b`: a level-`y` approximation that close to a boundary
/// cannot pin the leading digit, which may be off by one. In digit terms the
/// tail `d2..dy` is all zeros (just below a boundary from above) or all
/// `b-1` with a nonzero last digit (just below it from beneath).
pub fn infer_digit(gamma: &FixedFraction, level: u64) -> (u64, bool) {
    let digits = gamma.digits();
    assert_eq!(digits.len(), level as usize + 1, "gamma must carry y + 1 digits");
    let base = gamma.base();
    let inner = &digits[1..level as usize];
    let near_below = inner.iter().all(|&d| d == 0);
    let near_above = inner.iter().all(|&d| d == base - 1) && digits[level as usize] >= 1;
    (digits[0], near_below || near_above)
}
