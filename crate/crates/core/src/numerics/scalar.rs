use super::{Interval, QSurd, Rat};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// Floor on the precision used when an exact surd meets an interval operand.
const SURD_MIX_BITS: u32 = 256;

/// An exact or certified real number.
///
/// Rational and quadratic values compare exactly. Interval values compare
/// only when their enclosures decide the question; otherwise callers get
/// `None` (or [`Error::NeedsRefinement`]).
#[derive(Clone, PartialEq, Eq)]
pub enum Scalar {
    Rat(Rat),
    Surd(QSurd),
    Interval(Interval),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rat::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rat::one())
    }

    pub fn int(v: impl Into<BigInt>) -> Self {
        Scalar::Rat(Rat::int(v))
    }

    pub fn golden() -> Self {
        Scalar::Surd(QSurd::golden())
    }

    pub fn sqrt_of(x: &Rat) -> Result<Self> {
        Ok(Scalar::from(QSurd::sqrt_of(x)?))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Scalar::Interval(_))
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Scalar::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Radicand of a genuinely irrational surd.
    pub fn radicand(&self) -> Option<&BigInt> {
        match self {
            Scalar::Surd(s) if !s.is_rational() => Some(s.d()),
            _ => None,
        }
    }

    fn mix_bits(iv: &Interval) -> u32 {
        iv.precision_bits().map_or(SURD_MIX_BITS, |b| (b + 64).max(SURD_MIX_BITS))
    }

    /// Enclosure with roughly `bits` bits of absolute precision for exact kinds.
    pub fn enclose(&self, bits: u32) -> Interval {
        match self {
            Scalar::Rat(r) => Interval::point(r.clone()),
            Scalar::Surd(s) => s.enclose(bits),
            Scalar::Interval(i) => i.clone(),
        }
    }

    fn as_surd(&self) -> Option<QSurd> {
        match self {
            Scalar::Rat(r) => Some(QSurd::rational(r.clone())),
            Scalar::Surd(s) => Some(s.clone()),
            Scalar::Interval(_) => None,
        }
    }

    fn binary(
        &self,
        rhs: &Scalar,
        rat: impl Fn(&Rat, &Rat) -> Result<Rat>,
        surd: impl Fn(&QSurd, &QSurd) -> Result<QSurd>,
        iv: impl Fn(&Interval, &Interval) -> Result<Interval>,
    ) -> Result<Scalar> {
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(rat(a, b)?)),
            (Scalar::Interval(a), Scalar::Interval(b)) => Ok(Scalar::Interval(iv(a, b)?)),
            (Scalar::Interval(a), other) => {
                let b = other.enclose(Self::mix_bits(a));
                Ok(Scalar::Interval(iv(a, &b)?))
            }
            (other, Scalar::Interval(b)) => {
                let a = other.enclose(Self::mix_bits(b));
                Ok(Scalar::Interval(iv(&a, b)?))
            }
            _ => {
                let a = self.as_surd().expect("exact");
                let b = rhs.as_surd().expect("exact");
                Ok(Scalar::from(surd(&a, &b)?))
            }
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binary(rhs, |a, b| Ok(a + b), |a, b| a.add(b), |a, b| Ok(a.add(b)))
    }

    pub fn sub(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binary(rhs, |a, b| Ok(a - b), |a, b| a.sub(b), |a, b| Ok(a.sub(b)))
    }

    pub fn mul(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binary(rhs, |a, b| Ok(a * b), |a, b| a.mul(b), |a, b| Ok(a.mul(b)))
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Scalar> {
        self.binary(rhs, |a, b| a.checked_div(b), |a, b| a.div(b), |a, b| a.div(b))
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Surd(s) => Scalar::Surd(s.neg()),
            Scalar::Interval(i) => Scalar::Interval(i.neg()),
        }
    }

    pub fn square(&self) -> Scalar {
        match self {
            Scalar::Interval(i) => Scalar::Interval(i.square()),
            other => other.mul(other).expect("same radicand"),
        }
    }

    pub fn scale(&self, k: &Rat) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(r * k),
            Scalar::Surd(s) => Scalar::from(s.scale(k)),
            Scalar::Interval(i) => Scalar::Interval(i.scale(k)),
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> Scalar {
        self.scale(&Rat::int(k.clone()))
    }

    /// Certified sign: exact for rational and quadratic values, `None` when an
    /// interval straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        match self {
            Scalar::Rat(r) => Some(r.signum()),
            Scalar::Surd(s) => Some(s.signum()),
            Scalar::Interval(i) => i.sign(),
        }
    }

    pub fn sign_certified(&self, what: &str) -> Result<Ordering> {
        self.sign().ok_or_else(|| Error::refine(format!("sign of {what} is not determined by the enclosure")))
    }

    /// Certified comparison; `Ok(None)` when enclosures overlap.
    pub fn cmp_certified(&self, rhs: &Scalar) -> Result<Option<Ordering>> {
        Ok(self.sub(rhs)?.sign())
    }

    /// Exact floor, or `NeedsRefinement` when an interval straddles an integer.
    pub fn floor(&self) -> Result<BigInt> {
        match self {
            Scalar::Rat(r) => Ok(r.floor()),
            Scalar::Surd(s) => Ok(s.floor()),
            Scalar::Interval(i) => {
                let (a, b) = (i.lo().floor(), i.hi().floor());
                if a == b {
                    Ok(a)
                } else {
                    Err(Error::refine("interval straddles an integer"))
                }
            }
        }
    }

    /// Nearest integer, ties rounded toward zero.
    pub fn round_half_toward_zero(&self) -> Result<BigInt> {
        let half = Scalar::Rat(Rat::frac(1, 2));
        let up = self.add(&half)?;
        let f = up.floor()?;
        // A tie occurs exactly when x + 1/2 is an integer.
        if let Scalar::Rat(r) = &up {
            if r.is_integer() && self.sign() == Some(Ordering::Greater) {
                return Ok(f - 1);
            }
        }
        Ok(f)
    }

    pub fn abs(&self) -> Result<Scalar> {
        match self {
            Scalar::Interval(i) => Ok(Scalar::Interval(i.abs())),
            other => match other.sign() {
                Some(Ordering::Less) => Ok(other.neg()),
                _ => Ok(other.clone()),
            },
        }
    }

    /// Lower and upper rational bounds.
    pub fn bounds(&self, bits: u32) -> (Rat, Rat) {
        let e = self.enclose(bits);
        (e.lo().clone(), e.hi().clone())
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(64).midpoint().to_f64()
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::Rat(r)
    }
}

impl From<QSurd> for Scalar {
    fn from(s: QSurd) -> Self {
        match s.as_rational() {
            Some(r) => Scalar::Rat(r.clone()),
            None => Scalar::Surd(s),
        }
    }
}

impl From<Interval> for Scalar {
    fn from(i: Interval) -> Self {
        Scalar::Interval(i)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Surd(s) => write!(f, "{s}"),
            Scalar::Interval(i) => write!(f, "[{}, {}]", i.lo(), i.hi()),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Scalar::Rat(r) => r.serialize(s),
            Scalar::Surd(q) => q.serialize(s),
            Scalar::Interval(i) => i.serialize(s),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Text(String),
    Surd(QSurd),
    Interval(Interval),
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawScalar::deserialize(d)? {
            RawScalar::Text(t) => Scalar::parse(&t).map_err(serde::de::Error::custom),
            RawScalar::Surd(q) => Ok(Scalar::from(q)),
            RawScalar::Interval(i) => Ok(Scalar::Interval(i)),
        }
    }
}

impl Scalar {
    /// Text form: `n/d` and integers are exact; decimals become enclosures of
    /// radius `10^-digits`.
    pub fn parse(text: &str) -> Result<Scalar> {
        let t = text.trim();
        if t.contains('.') {
            Ok(Scalar::Interval(Interval::from_decimal(t)?))
        } else {
            Ok(Scalar::Rat(Rat::parse(t)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_sign_examples() {
        let phi = Scalar::golden();
        let x = Scalar::Rat(Rat::frac(13, 8)).sub(&phi).unwrap();
        assert_eq!(x.sign(), Some(Ordering::Greater));

        let p = phi.mul(&phi).unwrap().sub(&phi).unwrap().sub(&Scalar::one()).unwrap();
        assert_eq!(p.sign(), Some(Ordering::Equal));

        let iv = Scalar::Interval(Interval::new(Rat::frac(141, 100), Rat::frac(142, 100)).unwrap());
        let y = iv.sub(&Scalar::Rat(Rat::frac(3, 2))).unwrap();
        assert_eq!(y.sign(), Some(Ordering::Less));
    }

    #[test]
    fn division_by_zero_is_invalid() {
        assert_eq!(Scalar::one().div(&Scalar::zero()), Err(Error::DivisionByZero));
        let z = Scalar::golden().sub(&Scalar::golden()).unwrap();
        assert_eq!(Scalar::one().div(&z), Err(Error::DivisionByZero));
    }

    #[test]
    fn surd_meets_interval() {
        let iv = Scalar::Interval(Interval::ball(&Rat::int(1), &Rat::pow2_neg(100)));
        let s = Scalar::golden().add(&iv).unwrap();
        let e = s.enclose(0);
        assert!(e.lo() < &Rat::frac(2619, 1000) && e.hi() > &Rat::frac(2618, 1000));
        assert!(!s.is_exact());
    }

    #[test]
    fn rounding_ties_toward_zero() {
        assert_eq!(Scalar::Rat(Rat::frac(5, 2)).round_half_toward_zero().unwrap(), BigInt::from(2));
        assert_eq!(Scalar::Rat(Rat::frac(-5, 2)).round_half_toward_zero().unwrap(), BigInt::from(-2));
        assert_eq!(Scalar::Rat(Rat::frac(7, 3)).round_half_toward_zero().unwrap(), BigInt::from(2));
        assert_eq!(Scalar::golden().round_half_toward_zero().unwrap(), BigInt::from(2));
    }

    #[test]
    fn json_forms() {
        let r: Scalar = serde_json::from_str("\"-13/10\"").unwrap();
        assert_eq!(r, Scalar::Rat(Rat::frac(-13, 10)));
        let s: Scalar = serde_json::from_str(r#"{"a":"1/2","b":"1/2","d":5}"#).unwrap();
        assert_eq!(s, Scalar::golden());
        let i: Scalar = serde_json::from_str(r#"{"lo":"1/1","hi":"2/1"}"#).unwrap();
        assert!(matches!(i, Scalar::Interval(_)));
        assert_eq!(serde_json::to_string(&Scalar::golden()).unwrap(), r#"{"a":"1/2","b":"1/2","d":5}"#);
        assert!(serde_json::from_str::<Scalar>(r#"{"lo":"2/1","hi":"1/1"}"#).is_err());
    }
}
