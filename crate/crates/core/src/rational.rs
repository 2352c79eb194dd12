//! Helpers around [`BigRational`], the scalar type for every computation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

#[inline]
pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

#[inline]
pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Integer power of a rational; negative exponents invert.
pub fn q_pow(base: &Q, exp: i32) -> Q {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

/// Formats as `num/den`, dropping the denominator when it is 1.
pub fn fmt_q(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `num` or `num/den` with optional sign.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Numerator and denominator as decimal strings (denominator always positive).
pub fn q_to_parts(q: &Q) -> (String, String) {
    (q.numer().to_string(), q.denom().to_string())
}

pub fn q_from_parts(num: &str, den: &str) -> Result<Q> {
    parse_q(&format!("{num}/{den}"))
}

pub fn is_integer(q: &Q) -> bool {
    q.denom().is_one()
}

/// Checks the lowest-terms invariant that [`BigRational`] maintains.
pub fn is_reduced(q: &Q) -> bool {
    q.denom().is_positive() && q.numer().gcd(q.denom()).is_one()
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse() {
        assert_eq!(fmt_q(&q_frac(-77789, 362880)), "-77789/362880");
        assert_eq!(fmt_q(&q_int(-63)), "-63");
        assert_eq!(parse_q("6/4").unwrap(), q_frac(3, 2));
        assert_eq!(parse_q(" -7 ").unwrap(), q_int(-7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn binomials_and_factorials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(9), BigInt::from(362880));
    }

    #[test]
    fn reduced_after_ops() {
        let a = q_frac(6, 4) * q_frac(10, 3) - q_frac(1, 7);
        assert!(is_reduced(&a));
        assert_eq!(a, q_frac(34, 7));
    }
}
