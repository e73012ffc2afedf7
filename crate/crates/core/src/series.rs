//! Truncated power series, used as an independent oracle for the residues
//! that the closed forms replace by binomial sums.
//!
//! A residue at zero of `f(r) / r^{p}` is the coefficient of `r^{p-1}` in `f`,
//! so every evaluation here fixes its truncation order from the pole order.

use num_traits::{One, Zero};

use crate::combinatorics::binom;
use crate::error::{Error, Result};
use crate::rational::BigRational;

/// Coefficients `c_0, ..., c_{len-1}` of a series in one variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<BigRational>,
}

impl Series {
    pub fn one(len: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); len];
        if len > 0 {
            coeffs[0] = BigRational::one();
        }
        Self { coeffs }
    }

    /// `(1 + r)^b` for any integer `b`.
    pub fn binomial_power(b: i64, len: usize) -> Self {
        Self {
            coeffs: (0..len as i64).map(|j| BigRational::from_integer(binom(b, j))).collect(),
        }
    }

    /// `1 / (1 - r)`.
    pub fn geometric(len: usize) -> Self {
        Self { coeffs: vec![BigRational::one(); len] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Result<&BigRational> {
        self.coeffs
            .get(k)
            .ok_or_else(|| Error::Internal(format!("series truncated below order {k}")))
    }

    pub fn mul(&self, other: &Series) -> Series {
        let len = self.len().min(other.len());
        let mut coeffs = vec![BigRational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] += a * b;
            }
        }
        Series { coeffs }
    }
}

/// Which factors multiply the pure pole in a one-variable integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Integrand {
    /// Exponent `b` in `(1 + r)^b`.
    pub binomial_power: i64,
    /// Whether a `1 / (1 - r)` factor is present.
    pub geometric: bool,
}

/// Residue at zero of `(1+r)^b [1/(1-r)] / r^{pole_order}`.
pub fn residue_oracle(integrand: Integrand, pole_order: i64) -> Result<BigRational> {
    if pole_order <= 0 {
        return Ok(BigRational::zero());
    }
    let len = pole_order as usize;
    let mut s = Series::binomial_power(integrand.binomial_power, len);
    if integrand.geometric {
        s = s.mul(&Series::geometric(len));
    }
    s.coeff(len - 1).cloned()
}

/// Coefficients of a truncated series in two variables, indexed `[a][b]` for
/// `s1^a s2^b`.
#[derive(Clone, Debug)]
pub struct Series2 {
    coeffs: Vec<Vec<BigRational>>,
}

impl Series2 {
    /// `(s1 - s2) / (s1 s2 - 1) = -(s1 - s2) sum_m (s1 s2)^m`.
    pub fn kernel(len: usize) -> Self {
        let mut coeffs = vec![vec![BigRational::zero(); len]; len];
        for m in 0..len {
            if m + 1 < len {
                coeffs[m + 1][m] -= BigRational::one();
                coeffs[m][m + 1] += BigRational::one();
            }
        }
        Self { coeffs }
    }

    pub fn coeff(&self, a: usize, b: usize) -> Result<&BigRational> {
        self.coeffs
            .get(a)
            .and_then(|row| row.get(b))
            .ok_or_else(|| Error::Internal(format!("series truncated below order ({a},{b})")))
    }
}

/// Double residue of `(s1 - s2) / ((s1 s2 - 1) s1^{l1+1} s2^{l2+1})`.
pub fn kernel_residue_oracle(l1: usize, l2: usize) -> Result<BigRational> {
    let len = l1.max(l2) + 1;
    Series2::kernel(len).coeff(l1, l2).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn pure_pole_gives_binomial() {
        let i = Integrand { binomial_power: 5, geometric: false };
        assert_eq!(residue_oracle(i, 3).unwrap(), int(10));
        let i = Integrand { binomial_power: 2, geometric: false };
        assert_eq!(residue_oracle(i, 1).unwrap(), int(1));
    }

    #[test]
    fn geometric_factor_gives_partial_sum() {
        let i = Integrand { binomial_power: 4, geometric: true };
        // 1 + 4 + 6
        assert_eq!(residue_oracle(i, 3).unwrap(), int(11));
        assert_eq!(residue_oracle(i, 0).unwrap(), int(0));
    }

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_residue_oracle(0, 1).unwrap(), int(1));
        assert_eq!(kernel_residue_oracle(1, 0).unwrap(), int(-1));
        assert_eq!(kernel_residue_oracle(0, 0).unwrap(), int(0));
        assert_eq!(kernel_residue_oracle(3, 5).unwrap(), int(0));
    }

    #[test]
    fn truncation_is_reported() {
        let s = Series::one(2);
        assert!(matches!(s.coeff(2), Err(Error::Internal(_))));
    }
}
