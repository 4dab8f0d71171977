//! Exact rational scalars and their text form.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// The exact scalar used throughout the crate.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Returns the value as an `i64` when it is an integer that fits.
pub fn to_i64(x: &Q) -> Option<i64> {
    if is_integer(x) {
        x.numer().to_i64()
    } else {
        None
    }
}

/// Formats `p/q`, or a bare integer when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if is_integer(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

pub fn floor_div(a: i64, b: i64) -> i64 {
    Integer::div_floor(&a, &b)
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

pub fn lcm_of_denominators<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Serde adapter writing a rational as the string `p/q`.
pub mod serde_q {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_q(&v).map_err(de::Error::custom)
    }

    pub(crate) fn value_to_q(v: &serde_json::Value) -> std::result::Result<Q, String> {
        match v {
            serde_json::Value::String(s) => parse_q(s).map_err(|e| e.to_string()),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(q)
                .ok_or_else(|| format!("non-integral JSON number {n}")),
            other => Err(format!("expected rational, got {other}")),
        }
    }
}

/// Serde adapter for a list of rationals; integers are written as JSON
/// numbers and everything else as `p/q` strings.
pub mod serde_q_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&q_to_value(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let vs = Vec::<serde_json::Value>::deserialize(d)?;
        vs.iter()
            .map(|v| serde_q::value_to_q(v).map_err(de::Error::custom))
            .collect()
    }
}

pub fn q_to_value(x: &Q) -> serde_json::Value {
    match to_i64(x) {
        Some(n) => serde_json::Value::from(n),
        None => serde_json::Value::from(fmt_q(x)),
    }
}

/// Serializes any `Display` value as a JSON string.
pub fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    x: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/2").unwrap(), frac(3, 2));
        assert_eq!(parse_q("-4").unwrap(), q(-4));
        assert_eq!(parse_q(" 6/4 ").unwrap(), frac(3, 2));
        assert_eq!(fmt_q(&frac(-1, 2)), "-1/2");
        assert_eq!(fmt_q(&q(7)), "7");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn floor_division_rounds_down() {
        assert_eq!(floor_div(-3, 2), -2);
        assert_eq!(floor_div(3, 2), 1);
        assert_eq!(floor_div(-4, 2), -2);
    }
}
