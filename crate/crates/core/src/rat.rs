//! Exact rationals and the valuation codomain `Q ∪ {+∞}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational in lowest terms with positive denominator.
pub type Rat = BigRational;

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rat {
    Rat::from_integer(BigInt::from(p))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    Rat::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn floor(r: &Rat) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil(r: &Rat) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

pub fn mean(values: &[Rat]) -> Rat {
    if values.is_empty() {
        return Rat::zero();
    }
    values.iter().sum::<Rat>() / int(values.len() as i64)
}

pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// A valuation value: a rational, or `+∞` for the zero vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Finite(Rat),
    Infinity,
}

impl Val {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Val::Finite(r) => Some(r),
            Val::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Val::Infinity)
    }

    /// `self + shift`, with `∞ + c = ∞`.
    pub fn shifted(&self, shift: &Rat) -> Val {
        match self {
            Val::Finite(r) => Val::Finite(r + shift),
            Val::Infinity => Val::Infinity,
        }
    }

    pub fn expect_finite(self) -> Rat {
        match self {
            Val::Finite(r) => r,
            Val::Infinity => panic!("valuation is +infinity"),
        }
    }
}

impl From<Rat> for Val {
    fn from(r: Rat) -> Self {
        Val::Finite(r)
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Finite(r) => write!(f, "{r}"),
            Val::Infinity => f.write_str("inf"),
        }
    }
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

/// Serde adapter storing a [`Rat`] as its exact `p/q` text.
pub mod serde_rat {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let text = RatText::deserialize(d)?;
        text.into_rat().map_err(de::Error::custom)
    }

    /// Accept both `"3/4"` and bare JSON integers.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RatText {
        Text(String),
        Int(i64),
    }

    impl RatText {
        pub(crate) fn into_rat(self) -> Result<Rat> {
            match self {
                RatText::Text(s) => parse_rat(&s),
                RatText::Int(i) => Ok(int(i)),
            }
        }
    }
}

/// Serde adapter for `Vec<Rat>`.
pub mod serde_rat_vec {
    use super::*;
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
        let raw = Vec::<serde_rat::RatText>::deserialize(d)?;
        raw.into_iter()
            .map(|t| t.into_rat().map_err(de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Option<Rat>`, `null` when absent.
pub mod serde_rat_opt {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rat>, D::Error> {
        Option::<serde_rat::RatText>::deserialize(d)?
            .map(|t| t.into_rat().map_err(de::Error::custom))
            .transpose()
    }
}
