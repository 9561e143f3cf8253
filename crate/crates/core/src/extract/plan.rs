//! Choosing and validating the extraction parameters.
//!
//! A plan fixes the split `t = S*k - r` (`0 <= r <= S-1`, `1 <= k <= T`),
//! the term count `T`, and the per-term precision `w`. Admissibility:
//!
//! * `S*T*log(a) > 3*(log(n) + (shift + level + 2)*log(b))`
//! * `a^S > T^2`
//! * the tail of the partial-fraction expansion must stay below
//!   `b^-(level+2)`, which the two conditions above only guarantee once
//!   `S*T` is large; validation therefore also enforces the explicit margin
//!   `S*T*log2(a) > log2(n) + shift*log2(b) + 2T + (T+2)*log2(T) +
//!   (level+2)*log2(b) + 1`, raising `S` minimally when the balanced
//!   starting point falls short.
//!
//! All comparisons run on certified integer bounds for the logarithms
//! involved — never on floating point — so a plan that validates is a plan
//! whose error budget holds exactly.

use num_bigint::BigUint;

use crate::error::Error;
use crate::numutil::{floor_log_base, icbrt, log2_bounds};

/// Upper bound on `log(n)` kept in the symbolic form `mult * log(base)`, so
/// validation can weigh it against other logarithms exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogBound {
    mult: u64,
    base: u64,
}

impl LogBound {
    pub fn new(mult: u64, base: u64) -> Self {
        assert!(base >= 2);
        LogBound { mult, base }
    }

    /// Bound from a bit length: `log(n) <= bits * log(2)`.
    pub fn from_bits(bits: u64) -> Self {
        LogBound { mult: bits, base: 2 }
    }

    /// Bound from a digit count: `log(n) <= digits * log(base)`.
    pub fn from_digits(digits: u64, base: u64) -> Self {
        assert!(base >= 2);
        LogBound { mult: digits, base }
    }

    pub fn mult(&self) -> u64 {
        self.mult
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// `(lo, hi)` with `lo <= 2^64 * mult * log2(base) <= hi`.
    fn log2_q64(&self) -> (BigUint, BigUint) {
        let (lo, hi) = log2_bounds(self.base);
        (
            BigUint::from(self.mult) * BigUint::from(lo),
            BigUint::from(self.mult) * BigUint::from(hi),
        )
    }
}

/// Size caps that bound every derived parameter.
#[derive(Debug, Clone, Copy)]
pub struct PlanCaps {
    /// Cap on both split parameters `S` and `T`.
    pub max_split: u64,
    /// Cap on the per-term modulus size `S * log2(a)` in bits.
    pub max_modulus_bits: u64,
}

impl Default for PlanCaps {
    fn default() -> Self {
        PlanCaps { max_split: 1 << 26, max_modulus_bits: 1 << 31 }
    }
}

/// Validated parameters for one extraction run.
#[derive(Debug, Clone)]
pub struct ExtractionPlan {
    base: u64,
    digit_index: Option<u64>,
    level: u64,
    radix: u64,
    exponent: u64,
    shift: u64,
    split: u64,
    terms: u64,
    layer: u64,
    offset: u64,
    precision: u64,
    digits_approx: Option<u64>,
    log_n_bound: LogBound,
    zero_shortcut: bool,
}

impl ExtractionPlan {
    /// Output base `b`.
    pub fn base(&self) -> u64 {
        self.base
    }

    /// Digit index `m` (absent for plans built from raw parameters).
    pub fn digit_index(&self) -> Option<u64> {
        self.digit_index
    }

    /// Approximation level `y`: the report carries `y + 1` digits.
    pub fn level(&self) -> u64 {
        self.level
    }

    /// Radix `a` of the power decomposition `n / a^t`.
    pub fn radix(&self) -> u64 {
        self.radix
    }

    /// Exponent `t` of the power decomposition.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Shift `mu`: the target is `{b^mu * n / a^t}`.
    pub fn shift(&self) -> u64 {
        self.shift
    }

    /// Split parameter `S`.
    pub fn split(&self) -> u64 {
        self.split
    }

    /// Term count `T`.
    pub fn terms(&self) -> u64 {
        self.terms
    }

    /// Layer `k` with `t = S*k - offset`.
    pub fn layer(&self) -> u64 {
        self.layer
    }

    /// Offset `r` with `t = S*k - r`, `0 <= r <= S-1`.
    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// Working precision `w`: terms carry `w + 1` digits.
    pub fn precision(&self) -> u64 {
        self.precision
    }

    /// The digit-count approximation `A` the plan was built from, if any.
    pub fn digits_approx(&self) -> Option<u64> {
        self.digits_approx
    }

    pub fn log_n_bound(&self) -> LogBound {
        self.log_n_bound
    }

    /// True when the requested digit lies so far above the value that `0`
    /// is already a valid level-`y` answer.
    pub fn is_zero_shortcut(&self) -> bool {
        self.zero_shortcut
    }

    /// Construct a plan directly from its parts, checking only structural
    /// invariants (`k <= T`, the precision rule). Intended for tests and
    /// oracle audits; [`make_plan`] and [`make_plan_general`] are the
    /// validated builders.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        base: u64,
        shift: u64,
        level: u64,
        radix: u64,
        exponent: u64,
        split: u64,
        terms: u64,
        log_n_bound: LogBound,
    ) -> Result<Self, Error> {
        assert!(base >= 2 && level >= 1 && radix >= 2 && split >= 1 && terms >= 1);
        if exponent == 0 {
            return Err(Error::Infeasible("exponent t = 0 leaves no layer k >= 1".into()));
        }
        let layer = exponent.div_ceil(split);
        if layer > terms {
            return Err(Error::Infeasible(format!(
                "layer k = {layer} exceeds term count T = {terms}"
            )));
        }
        let offset = split * layer - exponent;
        let precision = precision_rule(level, terms, base);
        Ok(ExtractionPlan {
            base,
            digit_index: None,
            level,
            radix,
            exponent,
            shift,
            split,
            terms,
            layer,
            offset,
            precision,
            digits_approx: None,
            log_n_bound,
            zero_shortcut: false,
        })
    }
}

fn precision_rule(level: u64, terms: u64, base: u64) -> u64 {
    let w = level + floor_log_base(terms, base) + 3;
    // T / b^w <= b^-(level+2), i.e. T * b^(level+2) <= b^w, holds by
    // construction; keep the exact check close to the rule.
    let lhs = BigUint::from(terms) * BigUint::from(base).pow(level as u32 + 2);
    let rhs = BigUint::from(base).pow(w as u32);
    assert!(lhs <= rhs, "precision rule violated: T={terms} b={base} y={level} w={w}");
    w
}

/// `a^split > terms^2`, decided exactly for small powers and by certified
/// log bounds (conservatively) for large ones.
fn power_exceeds_square(radix: u64, split: u64, terms: u64) -> bool {
    let radix_bits = 64 - radix.leading_zeros() as u64;
    if split.saturating_mul(radix_bits) <= 4096 {
        let lhs = BigUint::from(radix).pow(split as u32);
        let rhs = BigUint::from(terms) * BigUint::from(terms);
        return lhs > rhs;
    }
    let (la_lo, _) = log2_bounds(radix);
    let (_, lt_hi) = log2_bounds(terms);
    BigUint::from(split) * BigUint::from(la_lo) > BigUint::from(2u32) * BigUint::from(lt_hi)
}

/// The admissibility requirement
/// `S*T*log(a) > 3*(log(n) + (shift+level+2)*log(b))`, certified.
fn st_requirement_holds(
    split: u64,
    terms: u64,
    radix: u64,
    base: u64,
    shift: u64,
    level: u64,
    log_n_bound: LogBound,
) -> bool {
    let (la_lo, _) = log2_bounds(radix);
    let (_, lb_hi) = log2_bounds(base);
    let (_, ln_hi) = log_n_bound.log2_q64();
    let lhs = BigUint::from(split) * BigUint::from(terms) * BigUint::from(la_lo);
    let rhs = (ln_hi + BigUint::from(shift + level + 2) * BigUint::from(lb_hi)) * 3u32;
    lhs > rhs
}

/// Sufficient condition for the expansion tail to stay below
/// `b^-(level+2)`; see the module docs for the inequality.
fn tail_margin_holds(
    split: u64,
    terms: u64,
    radix: u64,
    base: u64,
    shift: u64,
    level: u64,
    log_n_bound: LogBound,
) -> bool {
    const ONE_Q64: u128 = 1 << 64;
    let (la_lo, _) = log2_bounds(radix);
    let (_, lb_hi) = log2_bounds(base);
    let (_, lt_hi) = log2_bounds(terms);
    let (_, ln_hi) = log_n_bound.log2_q64();
    let lhs = BigUint::from(split) * BigUint::from(terms) * BigUint::from(la_lo);
    let rhs = ln_hi
        + BigUint::from(shift + level + 2) * BigUint::from(lb_hi)
        + BigUint::from(2 * terms) * BigUint::from(ONE_Q64)
        + BigUint::from(terms + 2) * BigUint::from(lt_hi)
        + BigUint::from(ONE_Q64);
    lhs > rhs
}

fn check_caps(split: u64, terms: u64, radix: u64, caps: &PlanCaps) -> Result<(), Error> {
    if split > caps.max_split || terms > caps.max_split {
        return Err(Error::Overflow(format!(
            "split parameters S={split}, T={terms} exceed cap {}",
            caps.max_split
        )));
    }
    let radix_bits = 64 - radix.leading_zeros() as u64;
    if split.saturating_mul(radix_bits) > caps.max_modulus_bits {
        return Err(Error::Overflow(format!(
            "per-term modulus would need about {} bits, cap is {}",
            split * radix_bits,
            caps.max_modulus_bits
        )));
    }
    Ok(())
}

/// Raise the balanced starting point `(split, terms)` minimally until every
/// admissibility condition holds.
#[allow(clippy::too_many_arguments)]
fn settle_split(
    mut split: u64,
    mut terms: u64,
    radix: u64,
    base: u64,
    exponent: u64,
    shift: u64,
    level: u64,
    log_n_bound: LogBound,
    caps: &PlanCaps,
) -> Result<(u64, u64, u64, u64), Error> {
    if exponent == 0 {
        return Err(Error::Infeasible("exponent t = 0 leaves no layer k >= 1".into()));
    }
    loop {
        check_caps(split, terms, radix, caps)?;
        let layer = exponent.div_ceil(split);
        if layer > terms {
            terms = layer;
            continue;
        }
        if !power_exceeds_square(radix, split, terms) {
            split += 1;
            continue;
        }
        if !st_requirement_holds(split, terms, radix, base, shift, level, log_n_bound) {
            split += 1;
            continue;
        }
        if !tail_margin_holds(split, terms, radix, base, shift, level, log_n_bound) {
            split += 1;
            continue;
        }
        let offset = split * layer - exponent;
        return Ok((split, terms, layer, offset));
    }
}

/// Plan for the `m`-th base-`b` digit of a value with roughly `digits_approx`
/// base-`b` digits (a factor-2 approximation suffices).
///
/// Sets `a = b`, `t = max(2A, m)`, `shift = t - m` and the balanced split
/// `S ~ R^(2/3)`, `T ~ R^(1/3)` for `R = 3(3A + shift + level + 2)`. When
/// `m >= 2A + level + 1` the digit is a leading zero beyond the value and
/// the plan short-circuits to the constant answer `0`.
pub fn make_plan(base: u64, digit_index: u64, level: u64, digits_approx: u64) -> Result<ExtractionPlan, Error> {
    make_plan_with_caps(base, digit_index, level, digits_approx, &PlanCaps::default())
}

pub fn make_plan_with_caps(
    base: u64,
    digit_index: u64,
    level: u64,
    digits_approx: u64,
    caps: &PlanCaps,
) -> Result<ExtractionPlan, Error> {
    assert!(base >= 2, "base must be at least 2");
    assert!(digit_index >= 1, "digit index starts at 1");
    assert!(level >= 1, "level must be at least 1");
    assert!(digits_approx >= 1, "digit-count approximation must be positive");

    let threshold = 2u128 * u128::from(digits_approx) + u128::from(level) + 1;
    if u128::from(digit_index) >= threshold {
        return Ok(ExtractionPlan {
            base,
            digit_index: Some(digit_index),
            level,
            radix: base,
            exponent: 0,
            shift: 0,
            split: 0,
            terms: 0,
            layer: 0,
            offset: 0,
            precision: level + 3,
            digits_approx: Some(digits_approx),
            log_n_bound: LogBound::from_digits(2 * digits_approx, base),
            zero_shortcut: true,
        });
    }

    let exponent = (2 * digits_approx).max(digit_index);
    let shift = exponent - digit_index;
    let log_n_bound = LogBound::from_digits(2 * digits_approx, base);

    // balanced starting point: R = 3 (3A + shift + level + 2), S ~ R^(2/3),
    // T ~ R^(1/3); the factor 3A (not 2A) buys slack for the validation
    let r_scale = 3u128
        * (3 * u128::from(digits_approx) + u128::from(shift) + u128::from(level) + 2);
    if r_scale > (1u128 << 63) {
        return Err(Error::Overflow("digit-count approximation too large".into()));
    }
    let split0 = icbrt(r_scale * r_scale) + 1;
    let terms0 = icbrt(r_scale) + 1;

    let (split, terms, layer, offset) = settle_split(
        split0, terms0, base, base, exponent, shift, level, log_n_bound, caps,
    )?;
    let precision = precision_rule(level, terms, base);

    Ok(ExtractionPlan {
        base,
        digit_index: Some(digit_index),
        level,
        radix: base,
        exponent,
        shift,
        split,
        terms,
        layer,
        offset,
        precision,
        digits_approx: Some(digits_approx),
        log_n_bound,
        zero_shortcut: false,
    })
}

/// Plan for `{b^shift * n / a^t}` from raw parameters. The caller guarantees
/// `0 < n < a^t` by supplying `log_n_bound < t * log(a)`.
pub fn make_plan_general(
    base: u64,
    shift: u64,
    level: u64,
    radix: u64,
    exponent: u64,
    log_n_bound: LogBound,
) -> Result<ExtractionPlan, Error> {
    make_plan_general_with_caps(base, shift, level, radix, exponent, log_n_bound, &PlanCaps::default())
}

pub fn make_plan_general_with_caps(
    base: u64,
    shift: u64,
    level: u64,
    radix: u64,
    exponent: u64,
    log_n_bound: LogBound,
    caps: &PlanCaps,
) -> Result<ExtractionPlan, Error> {
    assert!(base >= 2 && radix >= 2 && level >= 1);

    // R = 3 (log n + (shift + level + 2) log b) / log a, evaluated as a
    // certified upper bound and rounded up
    let (_, lb_hi) = log2_bounds(base);
    let (la_lo, _) = log2_bounds(radix);
    let (_, ln_hi) = log_n_bound.log2_q64();
    let numer = (ln_hi + BigUint::from(shift + level + 2) * BigUint::from(lb_hi)) * 3u32;
    let r_scale_big: BigUint = &numer / BigUint::from(la_lo) + 1u32;
    let r_scale = u128::try_from(&r_scale_big)
        .map_err(|_| Error::Overflow("admissibility ratio exceeds u128".into()))?;
    if r_scale > (1u128 << 63) {
        return Err(Error::Overflow("admissibility ratio too large for the caps".into()));
    }
    let split0 = icbrt(r_scale * r_scale) + 1;
    let terms0 = icbrt(r_scale) + 1;

    let (split, terms, layer, offset) = settle_split(
        split0, terms0, radix, base, exponent, shift, level, log_n_bound, caps,
    )?;
    let precision = precision_rule(level, terms, base);

    Ok(ExtractionPlan {
        base,
        digit_index: None,
        level,
        radix,
        exponent,
        shift,
        split,
        terms,
        layer,
        offset,
        precision,
        digits_approx: None,
        log_n_bound,
        zero_shortcut: false,
    })
}
