//! Exact hypergeometric tail probabilities via big-integer arithmetic.

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Probability that a uniform random draw of `drawn` items from a population
/// of `population` items, `marked` of which are marked, contains at least
/// `at_least` marked items:
///
/// `P(X >= m) = sum over j of C(K, j) * C(N-K, k-j) / C(N, k)`.
///
/// Computed exactly with big integers, then rounded once to `f64`.
pub fn random_inclusion_prob(
    population: u64,
    marked: u64,
    drawn: u64,
    at_least: u64,
) -> Result<f64> {
    if marked > population {
        return Err(Error::InvalidParameter(format!(
            "marked {marked} exceeds population {population}"
        )));
    }
    if drawn > population {
        return Err(Error::InvalidParameter(format!(
            "drawn {drawn} exceeds population {population}"
        )));
    }
    if at_least > drawn {
        return Err(Error::InvalidParameter(format!(
            "at_least {at_least} exceeds drawn {drawn}"
        )));
    }
    if at_least == 0 {
        return Ok(1.0);
    }
    let unmarked = population - marked;
    let mut numerator = BigUint::from(0u32);
    for j in at_least..=drawn.min(marked) {
        if drawn - j > unmarked {
            continue;
        }
        numerator += binomial(marked, j) * binomial(unmarked, drawn - j);
    }
    let denominator = binomial(population, drawn);
    Ok(big_ratio_to_f64(&numerator, &denominator))
}

/// Exact binomial coefficient; zero when `r > n`.
fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::from(0u32);
    }
    let r = r.min(n - r);
    let mut result = BigUint::from(1u32);
    for i in 0..r {
        result = result * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    result
}

/// Round `num/den` to the nearest f64 via an 80-bit scaled quotient.
fn big_ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    use num_bigint::ToBigUint;
    if num == &0u32.to_biguint().unwrap() {
        return 0.0;
    }
    let extra = 80i64 + den.bits() as i64 - num.bits() as i64;
    if extra > 0 {
        let scaled = (num << extra as u64) / den;
        biguint_to_f64(&scaled) * 2f64.powi(-(extra as i32))
    } else {
        biguint_to_f64(&(num / den))
    }
}

fn biguint_to_f64(x: &BigUint) -> f64 {
    // keep the top 64 bits and scale back up
    let bits = x.bits();
    if bits <= 64 {
        let digits = x.to_u64_digits();
        return digits.first().copied().unwrap_or(0) as f64;
    }
    let shift = bits - 64;
    let top = x >> shift;
    let digits = top.to_u64_digits();
    digits[0] as f64 * 2f64.powi(shift as i32)
}
