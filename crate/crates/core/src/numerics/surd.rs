use super::interval::{sqrt_bounds, Interval};
use super::Rat;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Largest radicand accepted; square-freeness is checked by trial division.
const MAX_RADICAND: u64 = 1_000_000_000_000;

/// The quadratic irrational `a + b sqrt(d)` with `d` square-free.
///
/// A value with `b = 0` is stored with `d = 1` so that equal numbers compare
/// equal structurally. Arithmetic is closed within one `d`; a rational
/// operand is compatible with any radicand.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSurd {
    a: Rat,
    b: Rat,
    d: BigInt,
}

#[derive(Serialize, Deserialize)]
struct RawSurd {
    a: Rat,
    b: Rat,
    d: u64,
}

impl Serialize for QSurd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.d.to_u64().expect("radicand bounded at construction");
        RawSurd { a: self.a.clone(), b: self.b.clone(), d }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSurd {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSurd::deserialize(d)?;
        QSurd::new(raw.a, raw.b, raw.d).map_err(serde::de::Error::custom)
    }
}

impl QSurd {
    /// Builds `a + b sqrt(d)`, pulling square factors out of `d`.
    pub fn new(a: Rat, b: Rat, d: impl Into<BigInt>) -> Result<Self> {
        let d: BigInt = d.into();
        let d64 = d
            .to_u64()
            .filter(|&v| (1..=MAX_RADICAND).contains(&v))
            .ok_or_else(|| Error::invalid(format!("radicand {d} must be in [1, {MAX_RADICAND}]")))?;
        let (outer, core) = square_split(d64);
        let b = b * Rat::int(outer);
        Ok(Self::canonical(a, b, BigInt::from(core)))
    }

    fn canonical(a: Rat, b: Rat, d: BigInt) -> Self {
        if b.is_zero() || d.is_one() {
            let a = if d.is_one() { a + b } else { a };
            QSurd { a, b: Rat::zero(), d: BigInt::one() }
        } else {
            QSurd { a, b, d }
        }
    }

    pub fn rational(a: Rat) -> Self {
        QSurd { a, b: Rat::zero(), d: BigInt::one() }
    }

    /// `sqrt(x)` for a nonnegative rational `x`.
    pub fn sqrt_of(x: &Rat) -> Result<Self> {
        if x.is_negative() {
            return Err(Error::invalid("square root of a negative rational"));
        }
        // sqrt(p/q) = sqrt(p q) / q
        let pq = x.numer() * x.denom();
        let scale = Rat::new(1, x.denom().clone())?;
        QSurd::new(Rat::zero(), scale, pq)
    }

    /// The golden ratio `(1 + sqrt 5) / 2`.
    pub fn golden() -> Self {
        QSurd::canonical(Rat::frac(1, 2), Rat::frac(1, 2), BigInt::from(5))
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.a)
    }

    fn common_d(&self, rhs: &QSurd) -> Result<BigInt> {
        match (self.is_rational(), rhs.is_rational()) {
            (true, true) => Ok(BigInt::one()),
            (true, false) => Ok(rhs.d.clone()),
            (false, true) => Ok(self.d.clone()),
            (false, false) if self.d == rhs.d => Ok(self.d.clone()),
            _ => Err(Error::MixedRadicand(self.d.clone(), rhs.d.clone())),
        }
    }

    pub fn add(&self, rhs: &QSurd) -> Result<Self> {
        let d = self.common_d(rhs)?;
        Ok(Self::canonical(&self.a + &rhs.a, &self.b + &rhs.b, d))
    }

    pub fn sub(&self, rhs: &QSurd) -> Result<Self> {
        let d = self.common_d(rhs)?;
        Ok(Self::canonical(&self.a - &rhs.a, &self.b - &rhs.b, d))
    }

    pub fn mul(&self, rhs: &QSurd) -> Result<Self> {
        let d = self.common_d(rhs)?;
        let dr = Rat::int(d.clone());
        let a = &self.a * &rhs.a + &self.b * &rhs.b * &dr;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        Ok(Self::canonical(a, b, d))
    }

    pub fn neg(&self) -> Self {
        QSurd { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Self::canonical(&self.a * k, &self.b * k, self.d.clone())
    }

    pub fn conj(&self) -> Self {
        QSurd { a: self.a.clone(), b: -&self.b, d: self.d.clone() }
    }

    /// Field norm `a^2 - d b^2`; zero only for zero since `d` is square-free.
    pub fn norm(&self) -> Rat {
        self.a.square() - self.b.square() * Rat::int(self.d.clone())
    }

    pub fn recip(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conj().scale(&n.recip()?))
    }

    pub fn div(&self, rhs: &QSurd) -> Result<Self> {
        self.mul(&rhs.recip()?)
    }

    /// Exact sign via the conjugate norm.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.signum();
        let sb = self.b.signum();
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        // a and b sqrt(d) have opposite signs: compare a^2 with b^2 d.
        match self.a.square().cmp(&(self.b.square() * Rat::int(self.d.clone()))) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn cmp_exact(&self, rhs: &QSurd) -> Result<Ordering> {
        Ok(self.sub(rhs)?.signum())
    }

    /// Enclosure of the value whose width is about `2^-bits` (relative to `b`).
    pub fn enclose(&self, bits: u32) -> Interval {
        if self.is_rational() {
            return Interval::point(self.a.clone());
        }
        let extra = self.b.log2_approx().max(0) as u32;
        let (lo, hi) = sqrt_bounds(&Rat::int(self.d.clone()), bits + extra + 2);
        let root = Interval::new(lo, hi).expect("ordered sqrt bounds");
        Interval::point(self.a.clone()).add(&root.scale(&self.b))
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor();
        }
        let e = self.enclose(64);
        let (f_lo, f_hi) = (e.lo().floor(), e.hi().floor());
        if f_lo == f_hi {
            return f_lo;
        }
        // Irrational, so never exactly at f_hi: one exact comparison settles the straddle.
        let at = QSurd::rational(Rat::int(f_hi.clone()));
        match self.sub(&at).expect("rational operand").signum() {
            Ordering::Less => f_lo,
            _ => f_hi,
        }
    }
}

/// `d = outer^2 * core` with `core` square-free.
fn square_split(mut d: u64) -> (u64, u64) {
    let mut outer = 1u64;
    let mut core = 1u64;
    let mut p = 2u64;
    while p * p <= d {
        let mut e = 0;
        while d.is_multiple_of(p) {
            d /= p;
            e += 1;
        }
        outer *= p.pow(e / 2);
        if e % 2 == 1 {
            core *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (outer, core * d)
}

impl fmt::Display for QSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl fmt::Debug for QSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
