//! Exact truth values on the unit interval.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number constrained to `[0, 1]`.
///
/// All arithmetic is exact. Truncated addition (`oplus`) and truncated
/// subtraction (`ominus`) keep results inside the interval.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(BigRational);

/// Parses `p/q`, an integer, or a finite decimal (`0.25`, `-1.5`) exactly.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = |reason: &str| Error::Number {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let s = text.trim();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| bad("bad numerator"))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad("no digits"));
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(bad("expected `p/q` or a decimal"));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).map_err(|_| bad("bad digits"))?;
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = BigRational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Formats a rational as `p/q`, or as an integer when the denominator is 1.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() || value > BigRational::one() {
            return Err(Error::OutOfRange(format_rational(&value)));
        }
        Ok(Scalar(value))
    }

    /// `numer/denom`; panics when the quotient leaves `[0, 1]`.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::new(BigRational::new(numer.into(), denom.into()))
            .expect("Scalar::ratio outside [0, 1]")
    }

    /// Clamps an arbitrary rational into `[0, 1]`.
    pub fn clamp(value: BigRational) -> Self {
        if value.is_negative() {
            Self::zero()
        } else if value > BigRational::one() {
            Self::one()
        } else {
            Scalar(value)
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_rational(text)?)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// `min(x + y, 1)`.
    pub fn oplus(&self, other: &Scalar) -> Scalar {
        Self::clamp(&self.0 + &other.0)
    }

    /// `max(x - y, 0)`.
    pub fn ominus(&self, other: &Scalar) -> Scalar {
        Self::clamp(&self.0 - &other.0)
    }

    /// `1 - x`.
    pub fn complement(&self) -> Scalar {
        Scalar(BigRational::one() - &self.0)
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar(&self.0 * &other.0)
    }

    pub fn abs_diff(&self, other: &Scalar) -> Scalar {
        Scalar((&self.0 - &other.0).abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scalar::parse(s)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Accepts strings (`"p/q"`, `"0.25"`) and plain JSON numbers. Numbers are
/// read through their shortest decimal form, so `0.2` means exactly `1/5`.
impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ScalarVisitor;

        impl Visitor<'_> for ScalarVisitor {
            type Value = Scalar;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational in [0,1] as \"p/q\" or a decimal")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
                Scalar::parse(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
                Scalar::parse(&v.to_string()).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
                Scalar::parse(&v.to_string()).map_err(E::custom)
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
                Scalar::parse(&format!("{v}")).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ScalarVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_parse_exactly() {
        assert_eq!(Scalar::parse("0.2").unwrap(), Scalar::ratio(1, 5));
        assert_eq!(Scalar::parse("0.05").unwrap(), Scalar::ratio(1, 20));
        assert_eq!(Scalar::parse("1").unwrap(), Scalar::one());
        assert_eq!(Scalar::parse(".5").unwrap(), Scalar::ratio(1, 2));
        assert_eq!(Scalar::parse("3/6").unwrap(), Scalar::ratio(1, 2));
    }

    #[test]
    fn rejects_out_of_range_and_garbage() {
        assert!(matches!(Scalar::parse("1.01"), Err(Error::OutOfRange(_))));
        assert!(matches!(Scalar::parse("-1/2"), Err(Error::OutOfRange(_))));
        assert!(Scalar::parse("1/0").is_err());
        assert!(Scalar::parse("abc").is_err());
        assert!(Scalar::parse("").is_err());
        assert!(Scalar::parse("1e3").is_err());
    }

    #[test]
    fn truncated_operations() {
        let a = Scalar::ratio(6, 10);
        let b = Scalar::ratio(7, 10);
        assert_eq!(a.oplus(&b), Scalar::one());
        assert_eq!(a.ominus(&b), Scalar::zero());
        assert_eq!(b.ominus(&a), Scalar::ratio(1, 10));
        assert_eq!(a.complement(), Scalar::ratio(2, 5));
    }

    #[test]
    fn display_and_serde() {
        assert_eq!(Scalar::ratio(2, 4).to_string(), "1/2");
        assert_eq!(Scalar::one().to_string(), "1");
        let json = serde_json::to_string(&Scalar::ratio(1, 3)).unwrap();
        assert_eq!(json, "\"1/3\"");
        let back: Scalar = serde_json::from_str("0.2").unwrap();
        assert_eq!(back, Scalar::ratio(1, 5));
        let back: Scalar = serde_json::from_str("\"1/3\"").unwrap();
        assert_eq!(back, Scalar::ratio(1, 3));
    }
}
