//! Exact rational helpers on top of `num-rational`.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Error;

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

pub fn parse_rational_list(s: &str) -> Result<Vec<Rational>, Error> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_rational).collect()
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `base^exp` for a signed integer exponent. Panics on `0^negative`.
pub fn pow_i(base: &Rational, exp: i64) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow(base.recip(), (-exp) as usize)
    }
}

fn int_nth_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return int_nth_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    (num_traits::pow(r.clone(), k as usize) == *n).then_some(r)
}

/// Exact `k`-th root of a rational, if one exists. For even `k` the positive root is returned.
pub fn nth_root(r: &Rational, k: u32) -> Option<Rational> {
    assert!(k > 0);
    if k == 1 {
        return Some(r.clone());
    }
    let n = int_nth_root(r.numer(), k)?;
    let d = int_nth_root(r.denom(), k)?;
    Some(Rational::new(n, d))
}

/// `base^(num/2)`: exact when `num` is even or `base` is a perfect square.
pub fn pow_half(base: &Rational, num2: i64) -> Option<Rational> {
    if num2 % 2 == 0 {
        Some(pow_i(base, num2 / 2))
    } else {
        let s = nth_root(base, 2)?;
        Some(pow_i(&s, num2))
    }
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// JSON form `{"num": "...", "den": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalJson {
    fn from(r: &Rational) -> Self {
        RationalJson { num: r.numer().to_string(), den: r.denom().to_string() }
    }
}

impl TryFrom<&RationalJson> for Rational {
    type Error = Error;
    fn try_from(j: &RationalJson) -> Result<Self, Error> {
        let n = BigInt::from_str(&j.num).map_err(|_| Error::Parse(format!("bad numerator {:?}", j.num)))?;
        let d = BigInt::from_str(&j.den).map_err(|_| Error::Parse(format!("bad denominator {:?}", j.den)))?;
        if d.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational::new(n, d))
    }
}

/// Serde adapter for a rational as `{"num","den"}`.
pub mod as_json {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalJson::from(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let j = RationalJson::deserialize(d)?;
        Rational::try_from(&j).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of rationals as `"p/q"` strings.
pub mod vec_as_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(format_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let strs = Vec::<String>::deserialize(d)?;
        strs.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

pub fn is_zero(r: &Rational) -> bool {
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-7").unwrap(), rat(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&ratio(-4, 6)), "-2/3");
        assert_eq!(parse_rational_list("1, 2/3,5").unwrap().len(), 3);
    }

    #[test]
    fn roots() {
        assert_eq!(nth_root(&ratio(9, 4), 2), Some(ratio(3, 2)));
        assert_eq!(nth_root(&ratio(-8, 27), 3), Some(ratio(-2, 3)));
        assert_eq!(nth_root(&rat(2), 2), None);
        assert_eq!(nth_root(&rat(-4), 2), None);
        assert_eq!(pow_half(&rat(4), 3), Some(rat(8)));
        assert_eq!(pow_half(&rat(2), -2), Some(ratio(1, 2)));
        assert_eq!(pow_half(&rat(2), 1), None);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), BigInt::from(6));
        assert_eq!(binomial(5, 0), BigInt::from(1));
    }
}
