//! Single-digit extraction for integers defined by straight-line programs.
//!
//! Given a positive integer `n` described by a straight-line program (a
//! sequence starting `0, 1` in which every later entry is the sum, difference
//! or product of two earlier entries), this crate computes the `m`-th base-`b`
//! digit of `n` — more precisely, a level-`y` approximation to the fractional
//! part `{n / b^m}` — without ever materializing `n`. For large powers the
//! workspace grows like `t^(2/3)` (times logarithmic factors) while `n`
//! itself needs `t log a` bits to write down.
//!
//! The pipeline:
//!
//! * [`slp`] — parse, generate and evaluate straight-line programs, either
//!   modulo an integer (the memory-frugal path) or exactly (the oracle path).
//! * [`extract`] — split `n / a^t` into `T` partial fractions
//!   `A_j / (a^S - j)`, approximate each term to `w+1` base-`b` digits from
//!   residues modulo a per-term modulus, and accumulate the fractional parts
//!   exactly.
//! * [`coeff`] — recover the one polynomial coefficient each term needs
//!   (`x^(k-1)` in `prod_{h != j} (x - h)`) from its residues modulo many
//!   small primes, using a per-prime product tree and a streaming CRT so the
//!   full multiprecision polynomial never exists.
//! * [`modmath`] — the supporting arithmetic: modular powers and inverses,
//!   a segmented prime stream with a primorial threshold, the CRT
//!   accumulator, and exact fixed-point base-`b` fractions.
//! * [`oracle`] — deliberately slow exact-rational reference implementations
//!   used by the test suite.
//! * [`workspace`] — instrumentation that measures live operand bits and
//!   modular-multiplication counts along the extraction path.

pub mod coeff;
pub mod error;
pub mod extract;
pub mod modmath;
pub mod oracle;
pub mod slp;
pub mod workspace;

pub(crate) mod numutil;

pub use error::Error;
pub use extract::{
    extract_digits, infer_digit, make_plan, make_plan_general, ExtractionPlan, DigitReport,
    LogBound, PlanCaps, RunStats, TermResult,
};
pub use modmath::{CrtAccumulator, FixedFraction, PrimeStream};
pub use slp::SlpProgram;
pub use workspace::Workspace;
