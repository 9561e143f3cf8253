//! Straight-line programs and their evaluators.
//!
//! A program is the sequence `s1 = 0, s2 = 1, s_i = s_j op s_k` (`op` one of
//! `+`, `-`, `*`, with `j, k < i`) and denotes the value of its last entry.
//! Subtraction may drive intermediates negative; only the final value has to
//! be a positive integer, and only the oracle path can check that.
//!
//! The on-disk encoding is the `slp v1` text format: a header line `slp v1`,
//! then one `add|sub|mul j k` line per step defining `s3, s4, ...` in order.
//! `#` starts a comment, `s1` and `s2` are implicit and never written.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use std::fmt;

use crate::error::Error;
use crate::numutil;
use crate::workspace::{Tracked, Workspace};

pub use crate::numutil::power_digit_approx;

/// Default bit-length cap for exact (oracle) evaluation.
pub const DEFAULT_EXACT_CAP_BITS: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Mul => "mul",
        })
    }
}

/// One record `s_i = s_j op s_k`. Indices are 1-based, matching the
/// `s1, s2, ...` numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub op: Op,
    pub j: u32,
    pub k: u32,
}

/// An immutable straight-line program; safe to share across workers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlpProgram {
    steps: Vec<Step>,
}

impl SlpProgram {
    /// Build from raw steps, validating operand indices.
    pub fn from_steps(steps: Vec<Step>) -> Result<Self, Error> {
        for (pos, step) in steps.iter().enumerate() {
            let defining = pos as u64 + 3;
            for idx in [step.j, step.k] {
                if idx < 1 {
                    return Err(Error::Parse {
                        line: pos + 2,
                        msg: format!("index {idx} is below 1"),
                    });
                }
                if u64::from(idx) >= defining {
                    return Err(Error::ForwardReference {
                        line: pos + 2,
                        index: u64::from(idx),
                    });
                }
            }
        }
        Ok(SlpProgram { steps })
    }

    /// The empty computation, denoting `n = s2 = 1`.
    pub fn one() -> Self {
        SlpProgram { steps: Vec::new() }
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// The length `L = 2 + number of records`.
    pub fn length(&self) -> u64 {
        2 + self.steps.len() as u64
    }

    /// Parse the `slp v1` text format.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut lines = text.lines().enumerate();
        // header: first line carrying any tokens must read `slp v1`
        let mut header_seen = false;
        let mut steps: Vec<Step> = Vec::new();
        for (idx, raw) in &mut lines {
            let line_no = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if tokens.is_empty() {
                continue;
            }
            if !header_seen {
                if tokens != ["slp", "v1"] {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("expected header `slp v1`, found `{}`", tokens.join(" ")),
                    });
                }
                header_seen = true;
                continue;
            }
            if tokens.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("expected `<op> <j> <k>`, found {} tokens", tokens.len()),
                });
            }
            let op = match tokens[0] {
                "add" => Op::Add,
                "sub" => Op::Sub,
                "mul" => Op::Mul,
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("unknown opcode `{other}`"),
                    })
                }
            };
            let parse_idx = |tok: &str| -> Result<u32, Error> {
                tok.parse::<u32>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("invalid index `{tok}`"),
                })
            };
            let j = parse_idx(tokens[1])?;
            let k = parse_idx(tokens[2])?;
            if j < 1 || k < 1 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "indices start at 1".into(),
                });
            }
            let defining = steps.len() as u64 + 3;
            for idx in [j, k] {
                if u64::from(idx) >= defining {
                    return Err(Error::ForwardReference {
                        line: line_no,
                        index: u64::from(idx),
                    });
                }
            }
            steps.push(Step { op, j, k });
        }
        if !header_seen {
            return Err(Error::Parse {
                line: 1,
                msg: "missing `slp v1` header".into(),
            });
        }
        Ok(SlpProgram { steps })
    }

    /// Serialize to the `slp v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::from("slp v1\n");
        for step in &self.steps {
            out.push_str(&format!("{} {} {}\n", step.op, step.j, step.k));
        }
        out
    }

    /// Program computing `a^t` by building the constant `a` from its binary
    /// digits and then squaring-and-multiplying over the binary digits of
    /// `t`. Length stays within `4 (floor(log2 a) + floor(log2 t) + 2)`.
    pub fn power(a: u64, t: u64) -> Self {
        assert!(a >= 2, "power base must be at least 2");
        assert!(t >= 1, "exponent must be at least 1");
        let mut steps = Vec::new();
        let a_idx = push_constant(&mut steps, a);
        let mut cur = a_idx;
        let bits = 64 - t.leading_zeros();
        for shift in (0..bits - 1).rev() {
            steps.push(Step { op: Op::Mul, j: cur, k: cur });
            cur = steps.len() as u32 + 2;
            if (t >> shift) & 1 == 1 {
                steps.push(Step { op: Op::Mul, j: cur, k: a_idx });
                cur = steps.len() as u32 + 2;
            }
        }
        SlpProgram { steps }
    }

    /// Program computing the constant `n >= 1` by doubling and adding.
    pub fn constant(n: &BigUint) -> Self {
        assert!(!n.is_zero(), "constant must be positive");
        let mut steps = Vec::new();
        let bits = n.bits();
        let mut cur = 2u32; // s2 = 1, the leading binary digit
        for shift in (0..bits - 1).rev() {
            steps.push(Step { op: Op::Add, j: cur, k: cur });
            cur = steps.len() as u32 + 2;
            if n.bit(shift) {
                steps.push(Step { op: Op::Add, j: cur, k: 2 });
                cur = steps.len() as u32 + 2;
            }
        }
        SlpProgram { steps }
    }

    /// Evaluate modulo `modulus >= 2`, holding only the table of `L`
    /// residues. The result is the normalized residue of `n`, whatever the
    /// signs of intermediate values.
    pub fn eval_mod(&self, modulus: &BigUint) -> BigUint {
        self.eval_mod_in(modulus, &Workspace::new())
    }

    /// Instrumented variant of [`SlpProgram::eval_mod`].
    pub fn eval_mod_in(&self, modulus: &BigUint, ws: &Workspace) -> BigUint {
        assert!(*modulus >= BigUint::from(2u32), "modulus must be at least 2");
        let mut table: Vec<Tracked> = Vec::with_capacity(self.steps.len() + 2);
        table.push(Tracked::new(ws, BigUint::zero()));
        table.push(Tracked::new(ws, BigUint::one()));
        for step in &self.steps {
            let a = table[step.j as usize - 1].get();
            let b = table[step.k as usize - 1].get();
            let value = match step.op {
                Op::Add => ws.add_mod(a, b, modulus),
                Op::Sub => ws.sub_mod(a, b, modulus),
                Op::Mul => ws.mul_mod(a, b, modulus),
            };
            table.push(Tracked::new(ws, value));
        }
        table.pop().expect("table never empty").into_inner()
    }

    /// Cheap upper bound on the bit length of every intermediate magnitude.
    pub fn value_bits_bound(&self) -> u64 {
        let mut bounds: Vec<u64> = Vec::with_capacity(self.steps.len() + 2);
        bounds.push(0);
        bounds.push(1);
        let mut worst = 1u64;
        for step in &self.steps {
            let a = bounds[step.j as usize - 1];
            let b = bounds[step.k as usize - 1];
            let bound = match step.op {
                Op::Add | Op::Sub => a.max(b).saturating_add(1),
                Op::Mul => a.saturating_add(b),
            };
            worst = worst.max(bound);
            bounds.push(bound);
        }
        worst
    }

    /// Exact evaluation under the default size cap. Oracle path: memory use
    /// is proportional to the value itself.
    pub fn eval_exact(&self) -> Result<BigUint, Error> {
        self.eval_exact_capped(DEFAULT_EXACT_CAP_BITS)
    }

    /// Exact evaluation, refusing when the cheap bit-length bound exceeds
    /// `cap_bits`.
    pub fn eval_exact_capped(&self, cap_bits: u64) -> Result<BigUint, Error> {
        let bound = self.value_bits_bound();
        if bound > cap_bits {
            return Err(Error::SizeCapExceeded { bound_bits: bound, cap_bits });
        }
        let mut table: Vec<BigInt> = Vec::with_capacity(self.steps.len() + 2);
        table.push(BigInt::zero());
        table.push(BigInt::one());
        for step in &self.steps {
            let a = &table[step.j as usize - 1];
            let b = &table[step.k as usize - 1];
            let value = match step.op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
            };
            table.push(value);
        }
        let n = table.pop().expect("table never empty");
        if !n.is_positive() {
            return Err(Error::ValueNotPositive);
        }
        Ok(n.to_biguint().expect("positive"))
    }

    /// Digit-count approximation `A` with `1/2 < A/d < 2` for the number `d`
    /// of base-`b` digits of the value. Computed by exact evaluation, so the
    /// factor-2 slack holds trivially; callers that must avoid the exact
    /// path supply their own approximation instead.
    pub fn estimate_digit_count(&self, base: u64) -> Result<u64, Error> {
        assert!(base >= 2);
        let n = self.eval_exact()?;
        Ok(numutil::digit_count(&n, base))
    }
}

fn push_constant(steps: &mut Vec<Step>, value: u64) -> u32 {
    debug_assert!(value >= 2);
    let bits = 64 - value.leading_zeros();
    let mut cur = 2u32;
    for shift in (0..bits - 1).rev() {
        steps.push(Step { op: Op::Add, j: cur, k: cur });
        cur = steps.len() as u32 + 2;
        if (value >> shift) & 1 == 1 {
            steps.push(Step { op: Op::Add, j: cur, k: 2 });
            cur = steps.len() as u32 + 2;
        }
    }
    cur
}
