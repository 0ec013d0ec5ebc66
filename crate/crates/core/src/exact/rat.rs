use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HydraError, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(n).map_err(|_| HydraError::Parse(format!("bad rational {s:?}")))?;
    let den = BigInt::from_str(d).map_err(|_| HydraError::Parse(format!("bad rational {s:?}")))?;
    if den.is_zero() {
        return Err(HydraError::Domain(format!("zero denominator in {s:?}")));
    }
    Ok(Rat::new(num, den))
}

pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A class of Q/Z, stored as its unique representative in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatMod1(Rat);

impl RatMod1 {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(HydraError::Domain("zero denominator".into()));
        }
        Ok(Self::from_rat(&rat(num, den)))
    }

    pub fn zero() -> Self {
        RatMod1(Rat::zero())
    }

    pub fn from_rat(r: &Rat) -> Self {
        let num = r.numer().mod_floor(r.denom());
        RatMod1(Rat::new(num, r.denom().clone()))
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn denom_u64(&self) -> u64 {
        self.0.denom().to_u64().expect("denominator fits in u64")
    }

    pub fn numer_u64(&self) -> u64 {
        self.0.numer().to_u64().expect("numerator fits in u64")
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, other: &RatMod1) -> RatMod1 {
        Self::from_rat(&(&self.0 + &other.0))
    }

    pub fn neg(&self) -> RatMod1 {
        Self::from_rat(&-&self.0)
    }

    pub fn scale(&self, k: &Rat) -> RatMod1 {
        Self::from_rat(&(&self.0 * k))
    }

    pub fn mul_int(&self, k: i64) -> RatMod1 {
        self.scale(&rat_int(k))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }
}

/// Canonical `[x]_1` of `num/den`.
pub fn rat_mod1(num: i64, den: i64) -> Result<RatMod1> {
    RatMod1::new(num, den)
}

impl fmt::Display for RatMod1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for RatMod1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for RatMod1 {
    type Err = HydraError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self::from_rat(&parse_rat(s)?))
    }
}

impl Serialize for RatMod1 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RatMod1 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Orders classes by reduced denominator, then numerator.
pub fn height_order(a: &RatMod1, b: &RatMod1) -> std::cmp::Ordering {
    a.denom().cmp(b.denom()).then_with(|| a.numer().cmp(b.numer()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_representatives() {
        assert_eq!(rat_mod1(7, 5).unwrap().to_string(), "2/5");
        assert_eq!(rat_mod1(-1, 3).unwrap().to_string(), "2/3");
        assert_eq!(rat_mod1(6, 3).unwrap().to_string(), "0/1");
        assert_eq!(rat_mod1(3, -4).unwrap().to_string(), "1/4");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(rat_mod1(1, 0), Err(HydraError::Domain(_))));
        assert!(parse_rat("3/0").is_err());
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(format_rat(&parse_rat("-6/4").unwrap()), "-3/2");
        assert_eq!(format_rat(&parse_rat("5").unwrap()), "5");
        assert_eq!("11/10".parse::<RatMod1>().unwrap().to_string(), "1/10");
    }
}
