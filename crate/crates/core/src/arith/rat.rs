//! Exact rationals and the small integer helpers used throughout the crate.
//!
//! `Rat` is `num_rational::BigRational`: always reduced, denominator positive.
//! Its `Display` already produces the wire format `p/q` (or `p` when `q = 1`)
//! with the sign on the numerator, and `FromStr` accepts the same format.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let t = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(Rat::new(p, q))
    } else {
        let p: BigInt = t.parse().map_err(|_| bad())?;
        Ok(Rat::from_integer(p))
    }
}

pub fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

/// Serde adapter storing a `Rat` as its `p/q` string.
pub mod rat_string {
    use super::{parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

/// Ceiling of `a / b` for `b > 0`, valid for negative `a`.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    Integer::div_floor(&a, &b) + if Integer::mod_floor(&a, &b) == 0 { 0 } else { 1 }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Ceiling factorial `c_N(m) = ceil(m/N) * c_N(m-1)`, `c_N(0) = 1`.
pub fn c_factor(n: u32, m: u32) -> Rat {
    assert!(n >= 1, "c_factor requires N >= 1");
    let n = n as i64;
    let mut acc = BigInt::one();
    for j in 1..=m as i64 {
        acc *= BigInt::from(ceil_div(j, n));
    }
    Rat::from_integer(acc)
}

/// `ceil(m/N)!^N * ceil(m/N)^(m - N ceil(m/N))`, the closed form of [`c_factor`] for `m > 0`.
pub fn c_factor_closed(n: u32, m: u32) -> Rat {
    assert!(n >= 1 && m >= 1);
    let c = ceil_div(m as i64, n as i64);
    let base = Rat::from_integer(factorial(c as u64).pow(n));
    let e = m as i64 - n as i64 * c;
    let cr = Rat::from_integer(BigInt::from(c));
    base * pow_i(&cr, e)
}

pub fn pow_i(r: &Rat, e: i64) -> Rat {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_factor_examples() {
        assert_eq!(c_factor(1, 5), rat(120));
        assert_eq!(c_factor(2, 0), rat(1));
        assert_eq!(c_factor(2, 5), rat(12));
        assert_eq!(c_factor(3, 7), rat(24));
    }

    #[test]
    fn c_factor_one_is_factorial() {
        for m in 0..=20u32 {
            assert_eq!(c_factor(1, m), Rat::from_integer(factorial(m as u64)));
        }
    }

    #[test]
    fn c_factor_closed_form_agrees() {
        for n in 1..=5 {
            for m in 1..=40 {
                assert_eq!(c_factor(n, m), c_factor_closed(n, m), "N={n} m={m}");
            }
        }
    }

    #[test]
    fn ceil_div_negative() {
        assert_eq!(ceil_div(-1, 2), 0);
        assert_eq!(ceil_div(-2, 3), 0);
        assert_eq!(ceil_div(-3, 3), -1);
        assert_eq!(ceil_div(5, 2), 3);
    }

    #[test]
    fn rat_strings() {
        assert_eq!(frac(-6, 4).to_string(), "-3/2");
        assert_eq!(rat(5).to_string(), "5");
        assert_eq!(parse_rat("-3/2").unwrap(), frac(-3, 2));
        assert_eq!(parse_rat(" 7 ").unwrap(), rat(7));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }
}
