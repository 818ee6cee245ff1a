//! Exact rational scalars and the extended value `+inf` used for uncontentiousness factors.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `base^exp` for a non-negative integer exponent.
pub fn pow(base: &Rational, exp: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"0.25"`.
pub fn parse(text: &str) -> Result<Rational> {
    let t = text.trim();
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.chars().all(|c| c.is_ascii_digit()) && !frac.is_empty() {
            let negative = whole.starts_with('-');
            let whole_abs = whole.trim_start_matches('-');
            let whole_val = if whole_abs.is_empty() {
                BigInt::zero()
            } else {
                BigInt::from_str(whole_abs).map_err(|e| Error::Parse(format!("{t}: {e}")))?
            };
            let frac_val =
                BigInt::from_str(frac).map_err(|e| Error::Parse(format!("{t}: {e}")))?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            let mag = Rational::new(whole_val * &scale + frac_val, scale);
            return Ok(if negative { -mag } else { mag });
        }
    }
    Rational::from_str(t).map_err(|e| Error::Parse(format!("{t}: {e}")))
}

pub fn format(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact dyadic rational equal to a finite `f64`.
pub fn from_f64(v: f64) -> Rational {
    Rational::from_float(v).unwrap_or_else(Rational::zero)
}

/// A rational extended with `+inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extended<T> {
    Finite(T),
    Infinite,
}

impl<T> Extended<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }
}

impl<T: Ord> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Ord> Ord for Extended<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        }
    }
}

impl<T: fmt::Display> fmt::Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => v.fmt(f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

pub type Factor = Extended<Rational>;

impl Factor {
    /// `1/beta` with `1/0 = inf`.
    pub fn reciprocal_of(beta: &Rational) -> Factor {
        if beta.is_zero() {
            Extended::Infinite
        } else {
            Extended::Finite(beta.recip())
        }
    }

    /// `num/den` for non-negative operands; `x/0` is `inf` for `x > 0`. `0/0` has no value.
    pub fn quotient(num: &Rational, den: &Rational) -> Option<Factor> {
        match (num.is_zero(), den.is_zero()) {
            (true, true) => None,
            (false, true) => Some(Extended::Infinite),
            _ => Some(Extended::Finite(num / den)),
        }
    }

    /// Whether this factor is at most the rational bound.
    pub fn at_most(&self, bound: &Rational) -> bool {
        matches!(self, Extended::Finite(v) if v <= bound)
    }
}

impl Serialize for Extended<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Serde adapter for rationals stored as `"p/q"` strings (integers are also accepted on input).
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        d.deserialize_any(RationalVisitor)
    }

    pub(crate) struct RationalVisitor;

    impl<'de> Visitor<'de> for RationalVisitor {
        type Value = Rational;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a rational as \"p/q\" or an integer")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
            parse(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
            Ok(int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
            Ok(Rational::from_integer(BigInt::from(v)))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rational, E> {
            // decimal literal, read through its shortest representation
            parse(&v.to_string()).map_err(E::custom)
        }
    }
}

pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        #[derive(Deserialize)]
        struct Wrapped(#[serde(with = "super::serde_rational")] Rational);
        let raw: Vec<Wrapped> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|w| w.0).collect())
    }
}

pub(crate) fn check_probability(p: &Rational) -> Result<()> {
    if p.is_negative() || *p > Rational::one() {
        return Err(Error::InvalidProbability(p.to_string()));
    }
    Ok(())
}
