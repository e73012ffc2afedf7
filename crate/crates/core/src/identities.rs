//! Hypergeometric summation identities behind the sum rule, with their
//! Wilf–Zeilberger certificates checked in exact arithmetic.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::combinatorics::{binom, catalan_extended, factorial, recip_factorial};
use crate::error::{invalid, Result};
use crate::rational::{int, sign_pow, BigRational};

fn fact(m: i64) -> BigRational {
    BigRational::from_integer(factorial(m as u64))
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::from(2).pow(e as u32))
    } else {
        BigRational::new(1.into(), BigInt::from(2).pow((-e) as u32))
    }
}

/// `f_n(k) = p(n,k,0) 2^{n-k}`, written with reciprocal factorials so that it
/// extends to `k = n + 1`.
pub fn f(n: i64, k: i64) -> BigRational {
    fact(n + k + 1)
        * fact(2 * n - k + 1)
        * recip_factorial(k)
        * recip_factorial(3 * n - k + 2)
        * sign_pow(k)
        * pow2(n - k)
        * int(3 * n - 3 * k + 2)
        * catalan_extended(n - k)
}

/// Certificate `h(n, k)` with `f_n(k) - f_{n+1}(k) = h(n, k+1) - h(n, k)`.
pub fn wz_h(n: i64, k: i64) -> BigRational {
    if k < 1 {
        return BigRational::zero();
    }
    let rf = recip_factorial(n + 2 - k);
    sign_pow(k)
        * pow2(n - k + 1)
        * int((n + 2 - k) * (n - k + 1) * (5 * n - 3 * k + 8))
        * fact(2 * n + 2 - k)
        * fact(n + 1 + k)
        * fact(2 * n + 2 - 2 * k)
        * recip_factorial(k - 1)
        * &rf
        * &rf
        * recip_factorial(3 * n + 5 - k)
}

pub fn identity_sum_f(n: i64) -> BigRational {
    (0..=n).map(|k| f(n, k)).sum()
}

/// Sum over the range extended by one, `sum_{k=0}^{n+1} f_n(k)`, which is
/// always `1/2`.
pub fn identity_sum_f_extended(n: i64) -> BigRational {
    (0..=n + 1).map(|k| f(n, k)).sum()
}

pub fn check_wz_certificate_f(n: i64, k: i64) -> bool {
    f(n, k) - f(n + 1, k) == wz_h(n, k + 1) - wz_h(n, k)
}

fn g_term(n: i64, i: i64, k: i64, j: i64) -> BigRational {
    f(n, k) / pow2(n - k) * BigRational::from_integer(binom(2 * n + 1 - i - k, j))
}

/// `(G_{n,i}, G'_{n,i})`; the expected values are `2^{n-i}` and
/// `(-1)^n 2^{n-i}`.
pub fn identity_sum_g(n: i64, i: i64) -> Result<(BigRational, BigRational)> {
    if i < 0 || i > n {
        return Err(invalid(format!("sum_g needs 0 <= i <= n, got i={i} n={n}")));
    }
    let mut g = BigRational::zero();
    let mut gp = BigRational::zero();
    for k in 0..=n {
        for j in 0..=n + i - 2 * k {
            g += g_term(n, i, k, j);
        }
        for j in 0..=n + k - 2 * i {
            gp += g_term(n, i, k, j);
        }
    }
    Ok((g, gp))
}

pub fn f_prime(n: i64, i: i64, k: i64) -> BigRational {
    sign_pow(k + 1)
        * int(3 * n - 3 * k + 2)
        * fact(n + k + 1)
        * fact(2 * n - k + 1)
        * fact(2 * n - i - k)
        * recip_factorial(k)
        * recip_factorial(3 * n - k + 2)
        * recip_factorial(n + i - 2 * k + 1)
        * recip_factorial(n + k - 2 * i)
        * catalan_extended(n - k)
}

/// `f'_{n,i}(k) R(k, i)` with the rational certificate `R` cancelled into the
/// hypergeometric term, so it stays finite where `R` has a pole.
pub fn f_prime_times_certificate(n: i64, i: i64, k: i64) -> BigRational {
    sign_pow(k + 1)
        * int(6 * k * (i - n) * (2 * n - 2 * k + 1) * (2 * n - k + 2))
        * fact(n + k + 1)
        * fact(2 * n - k + 1)
        * fact(2 * n - i - k)
        * recip_factorial(k)
        * recip_factorial(3 * n - k + 2)
        * recip_factorial(n + i - 2 * k + 2)
        * recip_factorial(n + k - 2 * i - 1)
        * catalan_extended(n - k)
}

/// The certificate `R(k, i)` itself, `None` where its denominator vanishes.
pub fn certificate_r(n: i64, i: i64, k: i64) -> Option<BigRational> {
    let den = (3 * n - 3 * k + 2) * (n + i - 2 * k + 2);
    (den != 0).then(|| {
        let num = 6 * k * (i - n) * (2 * n - 2 * k + 1) * (2 * n - k + 2) * (n + k - 2 * i);
        BigRational::new(num.into(), den.into())
    })
}

pub fn identity_sum_fprime(n: i64, i: i64) -> Result<BigRational> {
    if i < 0 || i > n - 1 {
        return Err(invalid(format!("sum_f' needs 0 <= i <= n-1, got i={i} n={n}")));
    }
    Ok((0..=n).map(|k| f_prime(n, i, k)).sum())
}

/// The recurrence in `i` produced by creative telescoping, with its
/// certificate: `a(i) f'(k,i) + b(i) f'(k,i+1) = F(k+1) - F(k)` where
/// `F = f' R`.
pub fn check_wz_certificate_fprime(n: i64, i: i64, k: i64) -> bool {
    let a = int(2 * (i + 1) * (i - 2 * n - 1) * (2 * i - 2 * n - 1));
    let b = int((i - 3 * n - 2) * (i - n + 1) * (i + n + 2));
    let lhs = a * f_prime(n, i, k) + b * f_prime(n, i + 1, k);
    let rhs = f_prime_times_certificate(n, i, k + 1) - f_prime_times_certificate(n, i, k);
    let consistent = match certificate_r(n, i, k) {
        Some(r) => f_prime(n, i, k) * r == f_prime_times_certificate(n, i, k),
        None => true,
    };
    lhs == rhs && consistent
}

/// One line per failing identity instance over `n` in the range.
pub fn run_identity_suite(ns: std::ops::RangeInclusive<i64>) -> Vec<String> {
    let mut failures = Vec::new();
    for n in ns {
        let expect = if n % 2 == 0 { int(1) } else { int(0) };
        if identity_sum_f(n) != expect {
            failures.push(format!("sum_f n={n}"));
        }
        if identity_sum_f_extended(n) != BigRational::new(1.into(), 2.into()) {
            failures.push(format!("sum_f extended n={n}"));
        }
        for k in 0..=n {
            if !check_wz_certificate_f(n, k) {
                failures.push(format!("wz f n={n} k={k}"));
            }
        }
        for i in 0..=n {
            let (g, gp) = identity_sum_g(n, i).expect("in range");
            if g != pow2(n - i) || gp != sign_pow(n) * pow2(n - i) {
                failures.push(format!("sum_g n={n} i={i}"));
            }
        }
        for i in 0..n {
            if !identity_sum_fprime(n, i).expect("in range").is_zero() {
                failures.push(format!("sum_f' n={n} i={i}"));
            }
            for k in 0..=n {
                if !check_wz_certificate_fprime(n, i, k) {
                    failures.push(format!("wz f' n={n} i={i} k={k}"));
                }
            }
        }
    }
    failures
}
