use crate::error::{Error, Result};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// Exact rational number in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(BigRational::new(numer.into(), denom)))
    }

    /// Panics on a zero denominator; for literals in code and tests.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Rat::new(numer, denom).expect("nonzero denominator")
    }

    pub fn int(value: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    /// `2^-bits`.
    pub fn pow2_neg(bits: u32) -> Self {
        Rat(BigRational::new(BigInt::one(), BigInt::one() << bits))
    }

    pub fn from_big(r: BigRational) -> Self {
        Rat(r)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn signum(&self) -> Ordering {
        self.numer().sign_ordering()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    pub fn ceil(&self) -> BigInt {
        -((-self.numer()).div_floor(self.denom()))
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rat) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Rat(&self.0 / &rhs.0))
    }

    pub fn square(&self) -> Self {
        Rat(&self.0 * &self.0)
    }

    pub fn min(self, other: Rat) -> Rat {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Rat) -> Rat {
        std::cmp::max(self, other)
    }

    /// Largest multiple of `2^-bits` not exceeding `self`.
    pub fn floor_dyadic(&self, bits: u32) -> Self {
        let scaled = self.numer() << bits;
        Rat(BigRational::new(scaled.div_floor(self.denom()), BigInt::one() << bits))
    }

    /// Smallest multiple of `2^-bits` not below `self`.
    pub fn ceil_dyadic(&self, bits: u32) -> Self {
        let scaled = -(self.numer() << bits);
        Rat(BigRational::new(-scaled.div_floor(self.denom()), BigInt::one() << bits))
    }

    /// Rough binary magnitude: `floor(log2 |self|)` up to one unit. Zero maps to `i64::MIN`.
    pub fn log2_approx(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN;
        }
        self.numer().bits() as i64 - self.denom().bits() as i64
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Parse `n/d`, `n`, or a finite decimal like `-1.25` (exactly).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = BigInt::from_str(n.trim()).map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let d = BigInt::from_str(d.trim()).map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            return Rat::new(n, d);
        }
        if let Some((whole, frac)) = parse_decimal(s) {
            let (value, _) = decimal_value(&whole, &frac)?;
            return Ok(value);
        }
        Err(Error::Parse(format!("not a rational: {s:?}")))
    }
}

trait SignOrdering {
    fn sign_ordering(&self) -> Ordering;
}

impl SignOrdering for BigInt {
    fn sign_ordering(&self) -> Ordering {
        match self.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

/// Splits a decimal literal into (signed integer part, fractional digits).
pub(crate) fn parse_decimal(s: &str) -> Option<(String, String)> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let whole = if whole.is_empty() { "0" } else { whole };
    Some((format!("{}{}", if neg { "-" } else { "" }, whole), frac.to_string()))
}

/// Exact value of a decimal literal and its number of fractional digits.
pub(crate) fn decimal_value(whole: &str, frac: &str) -> Result<(Rat, u32)> {
    let neg = whole.starts_with('-');
    let digits = format!("{}{}", whole.trim_start_matches('-'), frac);
    let mut n = BigInt::from_str(&digits).map_err(|_| Error::Parse(format!("bad decimal {whole}.{frac}")))?;
    if neg {
        n = -n;
    }
    let places = frac.len() as u32;
    let d = num_traits::pow(BigInt::from(10), places as usize);
    Ok((Rat::new(n, d)?, places))
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rat::parse(s)
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::int(v)
    }
}

impl From<BigInt> for Rat {
    fn from(v: BigInt) -> Self {
        Rat::int(v)
    }
}

impl From<&BigInt> for Rat {
    fn from(v: &BigInt) -> Self {
        Rat::int(v.clone())
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Rat::parse(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);

// Division panics on zero like the underlying type; fallible callers use `checked_div`.
rat_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}
