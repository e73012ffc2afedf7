//! Exact rational scalars and their canonical `p/q` text form.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational;

use crate::error::{invalid, Result};

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `(-1)^k` for any integer `k`.
pub fn sign_pow(k: i64) -> BigRational {
    if k.rem_euclid(2) == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

/// Canonical `p/q` with `q > 0`; integers keep the `/1`.
pub fn format_pq(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`; the result is reduced.
pub fn parse_pq(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| invalid(format!("bad rational '{s}'")))?;
    let q: BigInt = q.parse().map_err(|_| invalid(format!("bad rational '{s}'")))?;
    if q.is_zero() {
        return Err(invalid(format!("zero denominator in '{s}'")));
    }
    Ok(BigRational::new(p, q))
}

/// Lossy conversion used only for reporting.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn abs(r: &BigRational) -> BigRational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn integers_keep_denominator() {
        assert_eq!(format_pq(&int(-1)), "-1/1");
        assert_eq!(format_pq(&frac(4, -14)), "-2/7");
        assert_eq!(format_pq(&BigRational::zero()), "0/1");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_pq("1/0").is_err());
        assert!(parse_pq("x/2").is_err());
        assert_eq!(parse_pq(" 6 / 4 ").unwrap(), frac(3, 2));
        assert_eq!(parse_pq("-5").unwrap(), int(-5));
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(p in -10_000i64..10_000, q in 1i64..10_000) {
            let r = frac(p, q);
            let s = format_pq(&r);
            prop_assert_eq!(parse_pq(&s).unwrap(), r.clone());
            prop_assert_eq!(format_pq(&parse_pq(&s).unwrap()), s);
        }
    }
}
