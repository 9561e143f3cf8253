//! Exact-rational reference implementations.
//!
//! Everything here trades memory for certainty: values are computed with
//! arbitrary-precision rationals straight from their defining formulas, with
//! desk-scale guards, and exist to audit the extraction path in tests. None
//! of it belongs on a production path and none of it is instrumented.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::coeff_direct;
use crate::error::Error;
use crate::extract::ExtractionPlan;
use crate::slp::SlpProgram;

/// Exact rational values in reduced form.
pub type ExactRational = BigRational;

/// Desk-scale guard for the reconstruction audit.
pub const RECONSTRUCTION_MAX_TERMS: u64 = 12;

/// Exact fractional target `{n / b^m}`.
pub fn exact_nu(prog: &SlpProgram, base: u64, digit_index: u64) -> Result<ExactRational, Error> {
    assert!(base >= 2 && digit_index >= 1);
    let n = prog.eval_exact()?;
    let denom = BigUint::from(base).pow(
        u32::try_from(digit_index).map_err(|_| Error::Overflow("digit index".into()))?,
    );
    let rem = n % &denom;
    Ok(BigRational::new(BigInt::from(rem), BigInt::from(denom)))
}

/// First `count` base-`b` digits of `{n / b^m}`, exactly.
pub fn exact_nu_digits(
    prog: &SlpProgram,
    base: u64,
    digit_index: u64,
    count: u64,
) -> Result<Vec<u64>, Error> {
    assert!(base >= 2 && digit_index >= 1);
    let n = prog.eval_exact()?;
    let denom = BigUint::from(base).pow(
        u32::try_from(digit_index).map_err(|_| Error::Overflow("digit index".into()))?,
    );
    let mut rem = n % &denom;
    let mut digits = Vec::with_capacity(count as usize);
    for _ in 0..count {
        rem *= base;
        let digit = &rem / &denom;
        rem %= &denom;
        digits.push(u64::try_from(&digit).expect("digit below base"));
    }
    Ok(digits)
}

/// Whether `gamma` is a level-`y` approximation to `{n / b^m}` in mod-1
/// distance, decided with exact rationals.
pub fn is_level_approximation(
    prog: &SlpProgram,
    base: u64,
    digit_index: u64,
    level: u64,
    gamma: &crate::modmath::FixedFraction,
) -> Result<bool, Error> {
    let nu = exact_nu(prog, base, digit_index)?;
    let diff = (gamma.to_rational() - nu).abs();
    let dist = std::cmp::min(diff.clone(), BigRational::one() - diff);
    let budget = BigRational::new(BigInt::one(), BigInt::from(base).pow(level as u32));
    Ok(dist < budget)
}

/// Exact partial-fraction numerator
/// `A_j = n a^r * (coeff of x^(k-1) in prod_{h != j} (x-h)) / prod_{h != j} (j-h)`
/// from raw parameters.
pub fn exact_aj_parts(
    n: &BigUint,
    radix: u64,
    offset: u64,
    terms: u64,
    layer: u64,
    j: u64,
) -> Result<ExactRational, Error> {
    assert!((1..=terms).contains(&j) && (1..=terms).contains(&layer));
    let coefficient = coeff_direct(terms, layer, j)?;
    let numer = BigInt::from(n.clone())
        * BigInt::from(radix).pow(u32::try_from(offset).map_err(|_| {
            Error::Overflow("offset exponent".into())
        })?)
        * coefficient;
    // prod_{h != j} (j - h) = (-1)^(T-j) (j-1)! (T-j)!  (empty product = 1)
    let mut denom = BigInt::one();
    for i in 2..j {
        denom *= i;
    }
    for i in 2..=(terms - j) {
        denom *= i;
    }
    if (terms - j) % 2 == 1 {
        denom = -denom;
    }
    Ok(BigRational::new(numer, denom))
}

/// Exact `A_j` for a plan, also auditing the magnitude bound
/// `|A_j| <= n T a^S 4^T`.
pub fn exact_aj(
    plan: &ExtractionPlan,
    prog: &SlpProgram,
    j: u64,
) -> Result<ExactRational, Error> {
    let n = prog.eval_exact()?;
    let a_j = exact_aj_parts(&n, plan.radix(), plan.offset(), plan.terms(), plan.layer(), j)?;
    let bound = BigInt::from(n) * BigInt::from(plan.terms())
        * BigInt::from(plan.radix()).pow(
            u32::try_from(plan.split()).map_err(|_| Error::Overflow("split".into()))?,
        )
        * (BigInt::one() << (2 * plan.terms()));
    assert!(
        a_j.abs() <= BigRational::from(bound),
        "partial-fraction numerator bound violated for j = {j}"
    );
    Ok(a_j)
}

/// Exact term value `gamma_j = b^shift * A_j / (a^S - j)`.
pub fn term_value(
    plan: &ExtractionPlan,
    prog: &SlpProgram,
    j: u64,
) -> Result<ExactRational, Error> {
    let a_j = exact_aj(plan, prog, j)?;
    let denom = BigInt::from(plan.radix()).pow(plan.split() as u32) - BigInt::from(j);
    let shift_pow = BigInt::from(plan.base()).pow(
        u32::try_from(plan.shift()).map_err(|_| Error::Overflow("shift exponent".into()))?,
    );
    Ok(a_j * BigRational::new(shift_pow, denom))
}

/// Exact tail error `|E| = |b^shift n / a^t - sum_j gamma_j|`, asserted to
/// stay below `b^-(level+2)`.
pub fn reconstruction_error(
    plan: &ExtractionPlan,
    prog: &SlpProgram,
) -> Result<ExactRational, Error> {
    if plan.terms() > RECONSTRUCTION_MAX_TERMS {
        return Err(Error::GuardExceeded(format!(
            "reconstruction audit supports T <= {RECONSTRUCTION_MAX_TERMS}, got {}",
            plan.terms()
        )));
    }
    let n = prog.eval_exact()?;
    let shift_pow = BigInt::from(plan.base()).pow(
        u32::try_from(plan.shift()).map_err(|_| Error::Overflow("shift exponent".into()))?,
    );
    let alpha = BigRational::new(
        BigInt::from(n) * &shift_pow,
        BigInt::from(plan.radix()).pow(
            u32::try_from(plan.exponent()).map_err(|_| Error::Overflow("exponent".into()))?,
        ),
    );
    let mut sum = BigRational::zero();
    for j in 1..=plan.terms() {
        sum += term_value(plan, prog, j)?;
    }
    let error = (alpha - sum).abs();
    let budget = BigRational::new(
        BigInt::one(),
        BigInt::from(plan.base()).pow(plan.level() as u32 + 2),
    );
    assert!(
        error < budget,
        "tail error {error} at or above b^-(y+2); plan validation is broken"
    );
    Ok(error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{make_plan_general, LogBound};

    #[test]
    fn nu_digit_examples() {
        let prog = SlpProgram::power(2, 10);
        assert_eq!(exact_nu_digits(&prog, 10, 3, 4).unwrap(), vec![0, 2, 4, 0]);
        assert_eq!(exact_nu_digits(&SlpProgram::one(), 10, 1, 3).unwrap(), vec![1, 0, 0]);
        assert_eq!(exact_nu_digits(&prog, 2, 11, 3).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn aj_worked_example() {
        // n = 1, a = 2, S = 5, T = 3, k = 2, j = 2:
        // A_2 = 1 * 1 * (-4) / ((2-1)(2-3)) = 4
        let a2 = exact_aj_parts(&BigUint::one(), 2, 0, 3, 2, 2).unwrap();
        assert_eq!(a2, BigRational::from(BigInt::from(4)));
    }

    #[test]
    fn aj_single_term_empty_product() {
        // T = 1 forces j = k = 1 and an empty product: A_1 = n a^r
        let n = BigUint::from(42u32);
        let a1 = exact_aj_parts(&n, 3, 2, 1, 1, 1).unwrap();
        assert_eq!(a1, BigRational::from(BigInt::from(42 * 9)));
    }

    #[test]
    fn aj_solves_the_power_sum_system() {
        // sum_j A_j j^(i-1) must be 0 for i != k and n a^r for i = k
        let n = BigUint::from(17u32);
        for terms in 1u64..=8 {
            for layer in 1..=terms {
                let a: Vec<BigRational> = (1..=terms)
                    .map(|j| exact_aj_parts(&n, 2, 1, terms, layer, j).unwrap())
                    .collect();
                for i in 1..=terms {
                    let mut sum = BigRational::zero();
                    for (j, aj) in a.iter().enumerate() {
                        let weight = BigInt::from(j as u64 + 1).pow(i as u32 - 1);
                        sum += aj * BigRational::from(weight);
                    }
                    let expected = if i == layer {
                        BigRational::from(BigInt::from(17 * 2))
                    } else {
                        BigRational::zero()
                    };
                    assert_eq!(sum, expected, "T={terms} k={layer} row={i}");
                }
            }
        }
    }

    fn gauss_inverse(matrix: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
        let size = matrix.len();
        let mut work = matrix;
        let mut inverse: Vec<Vec<BigRational>> = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        for col in 0..size {
            let pivot_row = (col..size)
                .find(|&r| !work[r][col].is_zero())
                .expect("Vandermonde matrix is invertible");
            work.swap(col, pivot_row);
            inverse.swap(col, pivot_row);
            let pivot = work[col][col].clone();
            for j in 0..size {
                work[col][j] /= &pivot;
                inverse[col][j] /= &pivot;
            }
            for row in 0..size {
                if row == col || work[row][col].is_zero() {
                    continue;
                }
                let factor = work[row][col].clone();
                for j in 0..size {
                    let w = &work[col][j] * &factor;
                    work[row][j] -= w;
                    let v = &inverse[col][j] * &factor;
                    inverse[row][j] -= v;
                }
            }
        }
        inverse
    }

    #[test]
    fn vandermonde_inverse_matches_coefficient_formula() {
        for terms in 1u64..=8 {
            let matrix: Vec<Vec<BigRational>> = (0..terms)
                .map(|row| {
                    (1..=terms)
                        .map(|col| BigRational::from(BigInt::from(col).pow(row as u32)))
                        .collect()
                })
                .collect();
            let inverse = gauss_inverse(matrix);
            for j in 1..=terms {
                for k in 1..=terms {
                    // inverse entry (j, k) = coeff of x^(k-1) in
                    // prod_{h != j}(x-h) / prod_{h != j}(j-h)
                    let coefficient = coeff_direct(terms, k, j).unwrap();
                    let mut denom = BigInt::one();
                    for i in 2..j {
                        denom *= i;
                    }
                    for i in 2..=(terms - j) {
                        denom *= i;
                    }
                    if (terms - j) % 2 == 1 {
                        denom = -denom;
                    }
                    let expected = BigRational::new(coefficient, denom);
                    assert_eq!(
                        inverse[j as usize - 1][k as usize - 1],
                        expected,
                        "T={terms} j={j} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn reconstruction_error_on_tiny_plans() {
        // n = 1, shift 0, level 1: |E| < b^-3
        let plan = make_plan_general(10, 0, 1, 2, 10, LogBound::from_bits(1)).unwrap();
        if plan.terms() <= RECONSTRUCTION_MAX_TERMS {
            let err = reconstruction_error(&plan, &SlpProgram::one()).unwrap();
            assert!(err < BigRational::new(BigInt::one(), BigInt::from(1000)));
        }

        let plan = make_plan_general(10, 2, 2, 3, 9, LogBound::from_bits(12)).unwrap();
        if plan.terms() <= RECONSTRUCTION_MAX_TERMS {
            let prog = SlpProgram::power(2, 12); // 4096 < 3^9 = 19683
            reconstruction_error(&plan, &prog).unwrap();
        }
    }
}
