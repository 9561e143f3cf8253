//! Error type shared across the crate.

use thiserror::Error;

/// Errors surfaced by program parsing, oracle guards and plan construction.
#[derive(Debug, Error)]
pub enum Error {
    /// The SLP text did not conform to the `slp v1` format.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A step referenced an entry that is not defined yet.
    #[error("malformed program: forward reference at line {line} (index {index} not yet defined)")]
    ForwardReference { line: usize, index: u64 },

    /// The program evaluates to zero or a negative integer.
    #[error("program value is not positive")]
    ValueNotPositive,

    /// An exact evaluation would exceed the configured size cap.
    #[error("exact evaluation refused: bit-length bound {bound_bits} exceeds cap {cap_bits}")]
    SizeCapExceeded { bound_bits: u64, cap_bits: u64 },

    /// Requested a modular inverse of a residue divisible by the modulus.
    #[error("{0} is not invertible modulo {1}")]
    NotInvertible(u64, u64),

    /// No admissible parameter split exists under the configured caps.
    #[error("infeasible plan: {0}")]
    Infeasible(String),

    /// A derived parameter exceeded the configured bit-size caps.
    #[error("parameter overflow: {0}")]
    Overflow(String),

    /// A desk-scale guard on a reference-only operation was exceeded.
    #[error("desk-scale guard exceeded: {0}")]
    GuardExceeded(String),
}
