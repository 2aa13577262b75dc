//! Serde helpers: big integers as JSON numbers when they fit, strings otherwise.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigIntRepr(pub BigInt);

impl Serialize for BigIntRepr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntOrString {
    Int(i64),
    Str(String),
}

impl<'de> Deserialize<'de> for BigIntRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match IntOrString::deserialize(d)? {
            IntOrString::Int(v) => Ok(BigIntRepr(BigInt::from(v))),
            IntOrString::Str(s) => s.trim().parse().map(BigIntRepr).map_err(serde::de::Error::custom),
        }
    }
}

/// A rational given as a JSON integer or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalRepr(pub BigRational);

impl Serialize for RationalRepr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            BigIntRepr(self.0.to_integer()).serialize(s)
        } else {
            s.serialize_str(&self.0.to_string())
        }
    }
}

impl<'de> Deserialize<'de> for RationalRepr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match IntOrString::deserialize(d)? {
            IntOrString::Int(v) => Ok(RationalRepr(BigRational::from_integer(v.into()))),
            IntOrString::Str(s) => parse_rational(&s).map(RationalRepr).map_err(serde::de::Error::custom),
        }
    }
}

/// Parse `"p"`, `"p/q"` or a finite decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let num: BigInt = digits.parse().map_err(|e| format!("bad decimal {s:?}: {e}"))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    let r: BigRational = s.parse().map_err(|e| format!("bad rational {s:?}: {e}"))?;
    Ok(r)
}

pub fn int_vec(v: &[BigInt]) -> Vec<BigIntRepr> {
    v.iter().cloned().map(BigIntRepr).collect()
}

pub fn rat_string(r: &BigRational) -> String {
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_values_become_strings() {
        let big = BigIntRepr(BigInt::from(1u8) << 80usize);
        let s = serde_json::to_string(&big).unwrap();
        assert!(s.starts_with('"'));
        let back: BigIntRepr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, big);
        let small: BigIntRepr = serde_json::from_str("-7").unwrap();
        assert_eq!(small.0, BigInt::from(-7));
    }

    #[test]
    fn rationals_parse_in_three_forms() {
        assert_eq!(parse_rational("-1.25").unwrap(), BigRational::new((-5).into(), 4.into()));
        assert_eq!(parse_rational("3/6").unwrap(), BigRational::new(1.into(), 2.into()));
        let r: RationalRepr = serde_json::from_str("4").unwrap();
        assert!(r.0.is_integer());
    }
}
