use super::rat::{decimal_value, parse_decimal};
use super::Rat;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Closed interval `[lo, hi]` with exact rational endpoints.
///
/// Every operation returns an enclosure of all values the operation can take
/// over the operand boxes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    lo: Rat,
    hi: Rat,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Rat,
    hi: Rat,
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawInterval::deserialize(d)?;
        Interval::new(raw.lo, raw.hi).map_err(serde::de::Error::custom)
    }
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Self> {
        if lo > hi {
            return Err(Error::invalid(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Rat) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    /// `[center - radius, center + radius]`.
    pub fn ball(center: &Rat, radius: &Rat) -> Self {
        let r = radius.abs();
        Interval { lo: center - &r, hi: center + &r }
    }

    /// A decimal literal read as an enclosure of radius `10^-digits`, where
    /// `digits` is the number of fractional digits written.
    pub fn from_decimal(s: &str) -> Result<Self> {
        let (whole, frac) = parse_decimal(s.trim()).ok_or_else(|| Error::Parse(format!("not a decimal: {s:?}")))?;
        let (value, places) = decimal_value(&whole, &frac)?;
        let radius = Rat::new(1, Pow::pow(BigInt::from(10), places))?;
        Ok(Interval::ball(&value, &radius))
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) * Rat::frac(1, 2)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certified sign, or `None` when the enclosure straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn neg(&self) -> Self {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn add(&self, rhs: &Interval) -> Self {
        Interval { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }

    pub fn sub(&self, rhs: &Interval) -> Self {
        Interval { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }

    pub fn mul(&self, rhs: &Interval) -> Self {
        let c = [&self.lo * &rhs.lo, &self.lo * &rhs.hi, &self.hi * &rhs.lo, &self.hi * &rhs.hi];
        let lo = c.iter().min().cloned().unwrap_or_default();
        let hi = c.iter().max().cloned().unwrap_or_default();
        Interval { lo, hi }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    /// Tight enclosure of `{x^2}`; narrower than `self.mul(self)` around zero.
    pub fn square(&self) -> Self {
        let a = self.lo.square();
        let b = self.hi.square();
        if self.contains_zero() {
            Interval { lo: Rat::zero(), hi: a.max(b) }
        } else if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn abs(&self) -> Self {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            Interval { lo: Rat::zero(), hi: (-&self.lo).max(self.hi.clone()) }
        }
    }

    pub fn recip(&self) -> Result<Self> {
        if self.lo.is_zero() && self.hi.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.contains_zero() {
            return Err(Error::refine("reciprocal of an interval containing zero"));
        }
        Ok(Interval { lo: self.hi.recip()?, hi: self.lo.recip()? })
    }

    pub fn div(&self, rhs: &Interval) -> Result<Self> {
        Ok(self.mul(&rhs.recip()?))
    }

    pub fn hull(&self, other: &Interval) -> Self {
        Interval { lo: self.lo.clone().min(other.lo.clone()), hi: self.hi.clone().max(other.hi.clone()) }
    }

    /// Enclosure of `min(x, y)` over the box.
    pub fn min(&self, other: &Interval) -> Self {
        Interval { lo: self.lo.clone().min(other.lo.clone()), hi: self.hi.clone().min(other.hi.clone()) }
    }

    /// Enclosure of `max(x, y)` over the box.
    pub fn max(&self, other: &Interval) -> Self {
        Interval { lo: self.lo.clone().max(other.lo.clone()), hi: self.hi.clone().max(other.hi.clone()) }
    }

    /// Widen the endpoints outward onto the grid `2^-bits Z`.
    pub fn round_outward(&self, bits: u32) -> Self {
        Interval { lo: self.lo.floor_dyadic(bits), hi: self.hi.ceil_dyadic(bits) }
    }

    /// Enclosure of `sqrt` over the nonnegative part of `self`.
    pub fn sqrt(&self, rel_bits: u32) -> Result<Self> {
        if self.hi.is_negative() {
            return Err(Error::invalid("square root of a negative interval"));
        }
        let lo = if self.lo.is_positive() { sqrt_bounds(&self.lo, rel_bits).0 } else { Rat::zero() };
        let hi = sqrt_bounds(&self.hi, rel_bits).1;
        Ok(Interval { lo, hi })
    }

    /// Number of bits of absolute precision this enclosure carries (for a
    /// degenerate interval, `None`).
    pub fn precision_bits(&self) -> Option<u32> {
        let w = self.width();
        if w.is_zero() {
            None
        } else {
            Some((-w.log2_approx()).max(0) as u32)
        }
    }
}

/// Rational bounds `lo <= sqrt(x) <= hi` for `x >= 0`, exact when `x` is the
/// square of a rational; otherwise the gap is about `2^-rel_bits` relative.
pub fn sqrt_bounds(x: &Rat, rel_bits: u32) -> (Rat, Rat) {
    if !x.is_positive() {
        return (Rat::zero(), Rat::zero());
    }
    if let Some(r) = exact_sqrt(x) {
        return (r.clone(), r);
    }
    // Scale so that x * 4^b carries roughly 2*rel_bits significant bits.
    let mag = x.log2_approx();
    let b = (rel_bits as i64 + 2 - mag / 2).max(0) as u32;
    let scaled = x * Rat::int(BigInt::one() << (2 * b));
    let n_lo = scaled.floor();
    let n_hi = scaled.ceil();
    let s_lo = n_lo.sqrt();
    let mut s_hi = n_hi.sqrt();
    if &s_hi * &s_hi != n_hi {
        s_hi += 1;
    }
    let unit = Rat::pow2_neg(b);
    (Rat::int(s_lo) * &unit, Rat::int(s_hi) * unit)
}

/// `sqrt(x)` if it is rational.
pub fn exact_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &n * &n == *x.numer() && &d * &d == *x.denom() {
        Some(Rat::new(n, d).ok()?)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::new(Rat::frac(lo.0, lo.1), Rat::frac(hi.0, hi.1)).unwrap()
    }

    #[test]
    fn sign_below_three_halves() {
        let x = iv((141, 100), (142, 100)).sub(&Interval::point(Rat::frac(3, 2)));
        assert_eq!(x.sign(), Some(Ordering::Less));
        assert_eq!(iv((-1, 1), (1, 1)).sign(), None);
    }

    #[test]
    fn decimal_enclosure() {
        let x = Interval::from_decimal("1.414").unwrap();
        assert_eq!(x.lo(), &Rat::frac(1413, 1000));
        assert_eq!(x.hi(), &Rat::frac(1415, 1000));
    }

    #[test]
    fn square_straddling_zero() {
        let x = iv((-1, 2), (1, 3)).square();
        assert_eq!(x, iv((0, 1), (1, 4)));
    }

    #[test]
    fn sqrt_exact_and_enclosing() {
        assert_eq!(sqrt_bounds(&Rat::int(169), 20), (Rat::int(13), Rat::int(13)));
        let (lo, hi) = sqrt_bounds(&Rat::int(2), 64);
        assert!(lo.square() < Rat::int(2) && hi.square() > Rat::int(2));
        assert!(&hi - &lo < Rat::pow2_neg(60));
        let (lo, hi) = sqrt_bounds(&Rat::frac(1, 1_000_000_007), 30);
        let x = Rat::frac(1, 1_000_000_007);
        assert!(lo.square() <= x && x <= hi.square());
    }

    #[test]
    fn recip_rejects_zero_straddle() {
        assert!(matches!(iv((-1, 1), (1, 1)).recip(), Err(Error::NeedsRefinement(_))));
        assert!(matches!(Interval::point(Rat::zero()).recip(), Err(Error::DivisionByZero)));
    }
}
