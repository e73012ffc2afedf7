//! Exact factorials, binomials and the Catalan/ASM numbers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};
use crate::rational::BigRational;

pub fn factorial(m: u64) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, k| acc * k)
}

/// `1/m!`, taken as zero for negative `m`.
pub fn recip_factorial(m: i64) -> BigRational {
    if m < 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::one(), factorial(m as u64))
    }
}

/// Binomial coefficient valid for any integer top: zero when `b < 0`,
/// otherwise `a (a-1) ... (a-b+1) / b!`.
pub fn binom(a: i64, b: i64) -> BigInt {
    if b < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    for t in 0..b {
        num *= a - t;
    }
    num / factorial(b as u64)
}

/// `sum_{j=0}^{upper} binom(a, j)`, empty when `upper < 0`.
pub fn partial_binom_sum(a: i64, upper: i64) -> BigInt {
    (0..=upper).map(|j| binom(a, j)).sum()
}

pub fn catalan(m: i64) -> Result<BigInt> {
    if m < 0 {
        return Err(invalid(format!("catalan index {m} is negative")));
    }
    Ok(binom(2 * m, m) / (m + 1))
}

/// Catalan numbers extended by `C_{-1} = -1/2`, the value of
/// `binom(2m, m)/(m + 1)` read through the Gamma function.
pub fn catalan_extended(m: i64) -> BigRational {
    if m == -1 {
        BigRational::new((-1).into(), 2.into())
    } else if m < -1 {
        BigRational::zero()
    } else {
        BigRational::from_integer(binom(2 * m, m) / (m + 1))
    }
}

/// `A_m = prod_{i=0}^{m-1} (3i+1)!/(m+i)!`, the number of `m x m` alternating
/// sign matrices and of TSSCPPs of order `m`.
pub fn asm_number(m: i64) -> Result<BigInt> {
    if m < 1 {
        return Err(invalid(format!("A_m needs m >= 1, got {m}")));
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..m {
        num *= factorial((3 * i + 1) as u64);
        den *= factorial((m + i) as u64);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_values() {
        let c: Vec<i64> = [0, 3, 6]
            .iter()
            .map(|&m| catalan(m).unwrap().try_into().unwrap())
            .collect();
        assert_eq!(c, vec![1, 5, 132]);
        assert!(catalan(-1).is_err());
        assert_eq!(catalan_extended(-1), BigRational::new((-1).into(), 2.into()));
    }

    #[test]
    fn asm_values() {
        let a: Vec<i64> = (1..=9).map(|m| asm_number(m).unwrap().try_into().unwrap()).collect();
        assert_eq!(a, vec![1, 2, 7, 42, 429, 7436, 218348, 10850216, 911835460]);
        assert!(asm_number(0).is_err());
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(binom(5, 2), 10.into());
        assert_eq!(binom(2, 5), 0.into());
        assert_eq!(binom(-1, 3), (-1).into());
        assert_eq!(binom(-1, 0), 1.into());
        assert_eq!(binom(4, -1), 0.into());
        assert_eq!(partial_binom_sum(3, 1), 4.into());
        assert_eq!(partial_binom_sum(3, -1), 0.into());
    }
}
