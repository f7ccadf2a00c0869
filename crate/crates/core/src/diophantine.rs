//! Rational approximation of directions: continued fractions in the plane and
//! simultaneous Dirichlet approximation in higher dimension.

use crate::error::{Error, Result};
use crate::numerics::{gcd_all, int_serde, IntVec, Interval, Rat, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;

/// Default decimal precision for enclosures created from exact values.
pub const DEFAULT_DIGITS: u32 = 60;

/// Bits needed for `digits` decimal digits, rounded up.
pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as u64 * 3322).div_ceil(1000) as u32 + 4
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Irrationality {
    Rational,
    /// Certified irrational: some normalized entry is an exact irrational surd
    /// or a quotient of surds with different radicands.
    Quadratic,
    /// Interval entries; irrationality is presumed, not certified.
    Interval,
}

/// A fiber direction, normalized so the first stored entry is exactly 1.
///
/// `permutation[i]` is the original coordinate of stored entry `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionSpec {
    entries: Vec<Scalar>,
    permutation: Vec<usize>,
    kind: Irrationality,
}

impl DirectionSpec {
    pub fn new(raw: Vec<Scalar>) -> Result<Self> {
        normalize_direction(raw, DEFAULT_DIGITS)
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Stored entries; the first is exactly 1.
    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn kind(&self) -> Irrationality {
        self.kind
    }

    pub fn is_rational(&self) -> bool {
        self.kind == Irrationality::Rational
    }

    /// The normalized direction in original coordinate order.
    pub fn original(&self) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); self.n()];
        for (i, &orig) in self.permutation.iter().enumerate() {
            out[orig] = self.entries[i].clone();
        }
        out
    }

    /// Integer tuple in stored order mapped to original order.
    pub fn unpermute_ints(&self, stored: &[BigInt]) -> IntVec {
        let mut out = vec![BigInt::zero(); stored.len()];
        for (i, &orig) in self.permutation.iter().enumerate() {
            out[orig] = stored[i].clone();
        }
        out
    }

    /// Enclosure precision in bits for interval directions, if any entry is an interval.
    pub fn interval_bits(&self) -> Option<u32> {
        self.entries
            .iter()
            .filter_map(|e| match e {
                Scalar::Interval(i) => Some(i.precision_bits().unwrap_or(u32::MAX)),
                _ => None,
            })
            .min()
    }
}

/// Normalize a raw direction: move the first certified-nonzero entry to the
/// front and divide through by it.
///
/// Quotients of surds with different radicands are replaced by enclosures of
/// `digits` decimal digits.
pub fn normalize_direction(raw: Vec<Scalar>, digits: u32) -> Result<DirectionSpec> {
    let n = raw.len();
    if n < 2 {
        return Err(Error::invalid("direction needs at least two entries"));
    }
    let pivot = raw
        .iter()
        .position(|x| matches!(x.sign(), Some(Ordering::Less | Ordering::Greater)))
        .ok_or(Error::IndeterminateDirection)?;
    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.swap(0, pivot);
    let lead = raw[pivot].clone();
    let bits = digits_to_bits(digits);

    let mut entries = Vec::with_capacity(n);
    let mut certified_irrational = false;
    for &orig in &permutation {
        let x = &raw[orig];
        let q = match x.div(&lead) {
            Ok(q) => q,
            Err(Error::MixedRadicand(_, _)) => {
                // Both are surds in different quadratic fields; a nonzero
                // quotient cannot be rational.
                certified_irrational |= x.sign() != Some(Ordering::Equal);
                let num = x.enclose(bits + 8);
                let den = lead.enclose(bits + 8);
                Scalar::Interval(num.div(&den)?.round_outward(bits + 4))
            }
            Err(e) => return Err(e),
        };
        if matches!(q, Scalar::Surd(_)) {
            certified_irrational = true;
        }
        entries.push(q);
    }
    entries[0] = Scalar::one();

    let kind = if entries.iter().all(|e| matches!(e, Scalar::Rat(_))) {
        Irrationality::Rational
    } else if certified_irrational {
        Irrationality::Quadratic
    } else {
        Irrationality::Interval
    };
    Ok(DirectionSpec { entries, permutation, kind })
}

#[derive(Serialize)]
struct DirectionOut<'a> {
    entries: &'a [Scalar],
    kind: Irrationality,
    normalized: bool,
    permutation: &'a [usize],
}

impl Serialize for DirectionSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DirectionOut { entries: &self.entries, kind: self.kind, normalized: true, permutation: &self.permutation }
            .serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DirectionIn {
    List(Vec<Scalar>),
    Object {
        entries: Vec<Scalar>,
        #[serde(default)]
        kind: Option<Irrationality>,
        #[serde(default)]
        permutation: Option<Vec<usize>>,
    },
}

impl<'de> Deserialize<'de> for DirectionSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let (entries, kind, permutation) = match DirectionIn::deserialize(d)? {
            DirectionIn::List(e) => (e, None, None),
            DirectionIn::Object { entries, kind, permutation } => (entries, kind, permutation),
        };
        let raw = match permutation {
            None => entries,
            Some(perm) => {
                let mut seen = vec![false; entries.len()];
                if perm.len() != entries.len() || perm.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
                    return Err(D::Error::custom("permutation is not a permutation of the entries"));
                }
                let mut raw = vec![Scalar::zero(); entries.len()];
                for (i, e) in entries.into_iter().enumerate() {
                    raw[perm[i]] = e;
                }
                raw
            }
        };
        let spec = DirectionSpec::new(raw).map_err(D::Error::custom)?;
        // Mixed-radicand quotients are stored as enclosures, so a declared
        // "quadratic" may legitimately reload as "interval".
        if let Some(k) = kind {
            if (k == Irrationality::Rational) != spec.is_rational() {
                return Err(D::Error::custom(format!("declared kind {k:?} but entries classify as {:?}", spec.kind)));
            }
        }
        Ok(spec)
    }
}

/// One rational approximation of a direction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxStep {
    /// Convergent index (1-based) for planar directions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none", with = "opt_int")]
    pub big_q: Option<BigInt>,
    #[serde(with = "int_serde::one")]
    pub q: BigInt,
    /// Stored coordinate order, `p[0] = q`.
    #[serde(with = "int_serde::vec")]
    pub p: IntVec,
    /// Upper bound on `|p/q - kappa|` (planar) or `max_j |kappa_j q - p_j|`.
    pub err_bound: Rat,
}

mod opt_int {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(x) => int_serde::one::serialize(x, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<BigInt>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "int_serde::one")] BigInt);
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// The first `count` continued-fraction convergents `(p, q)` of `kappa`.
///
/// Rational input always fails with [`Error::FiniteExpansion`] carrying the
/// complete expansion.
pub fn convergents_2d(kappa: &Scalar, count: usize) -> Result<Vec<(BigInt, BigInt)>> {
    if count == 0 {
        return Err(Error::invalid("convergent count must be at least 1"));
    }
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut x = kappa.clone();
    let mut out = Vec::new();
    let rational = matches!(kappa, Scalar::Rat(_));
    loop {
        let a = x.floor()?;
        let p = &a * &p1 + &p0;
        let q = &a * &q1 + &q0;
        (p0, q0, p1, q1) = (p1, q1, p.clone(), q.clone());
        out.push((p, q));
        if out.len() >= count && !rational {
            return Ok(out);
        }
        let frac = x.sub(&Scalar::int(a))?;
        match frac.sign() {
            Some(Ordering::Equal) => return Err(Error::FiniteExpansion(out)),
            Some(_) => x = Scalar::one().div(&frac)?,
            None => return Err(Error::refine("continued fraction exhausted the enclosure precision")),
        }
    }
}

/// As many convergents as the enclosure of `kappa` supports, up to `count`,
/// together with the error that stopped the expansion early (if any).
pub fn convergents_partial(kappa: &Scalar, count: usize) -> (Vec<(BigInt, BigInt)>, Option<Error>) {
    match convergents_2d(kappa, count.max(1)) {
        Ok(list) => (list, None),
        Err(Error::FiniteExpansion(list)) => {
            let head = list[..list.len().min(count)].to_vec();
            (head, Some(Error::FiniteExpansion(list)))
        }
        Err(e @ Error::NeedsRefinement(_)) => {
            // Longest prefix the enclosure decides; success is monotone in the count.
            let (mut good, mut bad) = (0usize, count.max(1));
            while bad - good > 1 {
                let mid = (good + bad) / 2;
                if convergents_2d(kappa, mid).is_ok() {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            let list = if good == 0 { Vec::new() } else { convergents_2d(kappa, good).unwrap_or_default() };
            (list, Some(e))
        }
        Err(e) => (Vec::new(), Some(e)),
    }
}

/// The convergents of [`convergents_2d`] packaged as approximation steps,
/// each with a certified `|p/q - kappa| < 1/q^2`.
pub fn convergent_steps(kappa: &Scalar, count: usize) -> Result<Vec<ApproxStep>> {
    let list = convergents_2d(kappa, count)?;
    list.into_iter()
        .enumerate()
        .map(|(i, (p, q))| {
            let approx = Rat::new(p.clone(), q.clone())?;
            let err = Scalar::Rat(approx).sub(kappa)?.abs()?;
            let bound = Rat::new(1, &q * &q)?;
            let slack = Scalar::Rat(bound.clone()).sub(&err)?;
            if slack.sign() != Some(Ordering::Greater) {
                return Err(Error::refine("convergent bound not certified at this precision"));
            }
            let bits = 64 + 2 * q.bits() as u32;
            let ub = err.enclose(bits).hi().ceil_dyadic(bits).min(bound);
            Ok(ApproxStep { index: Some(i + 1), big_q: None, q: q.clone(), p: vec![q, p], err_bound: ub })
        })
        .collect()
}

/// Fixed-point enclosure `[lo, hi] / 2^f` of a scalar.
fn fixed_point(x: &Scalar, f: u32) -> (BigInt, BigInt) {
    let e = x.enclose(f + 4);
    let scale = Rat::int(BigInt::one() << f);
    ((e.lo() * &scale).floor(), (e.hi() * &scale).ceil())
}

/// True when every point of `[lo, hi]` lies farther than `tol` from the
/// multiples of `unit`.
fn certified_miss(lo: &BigInt, hi: &BigInt, unit: &BigInt, tol: &BigInt) -> bool {
    let (k, r_lo) = lo.div_mod_floor(unit);
    if r_lo.is_zero() || hi.div_floor(unit) != k {
        return false;
    }
    let r_hi = hi - &k * unit;
    let dist = |r: &BigInt| -> BigInt { r.clone().min(unit - r) };
    &dist(&r_lo) > tol && &dist(&r_hi) > tol
}

/// Smallest `q` in `[1, Q^n)` whose nearest-integer tuple approximates every
/// `kappa_j q` within `1/Q`.
pub fn simultaneous_approx(v: &DirectionSpec, big_q: &BigInt) -> Result<ApproxStep> {
    if big_q < &BigInt::from(2) {
        return Err(Error::invalid("Q must be at least 2"));
    }
    let n = v.n();
    let limit: BigInt = num_traits::pow(big_q.clone(), n);
    let q_bits = limit.bits() as u32;
    let f = match v.interval_bits() {
        Some(b) => (b + 8).min(q_bits + 96),
        None => q_bits + 96,
    };
    let kappas: Vec<(BigInt, BigInt)> = v.entries()[1..].iter().map(|k| fixed_point(k, f)).collect();
    let unit = BigInt::one() << f;
    let tol_hi = unit.div_ceil(big_q);
    let inv_q = Rat::new(1, big_q.clone())?;

    let mut acc: Vec<(BigInt, BigInt)> = vec![(BigInt::zero(), BigInt::zero()); n - 1];
    let mut q = BigInt::zero();
    loop {
        q += 1;
        if q >= limit {
            return Err(Error::SearchExhausted { steps: 0, best_admissible_r: None });
        }
        for (a, k) in acc.iter_mut().zip(&kappas) {
            a.0 += &k.0;
            a.1 += &k.1;
        }
        if acc.iter().any(|(lo, hi)| certified_miss(lo, hi, &unit, &tol_hi)) {
            continue;
        }
        // Exact (or enclosure-certified) confirmation.
        let mut p = vec![q.clone()];
        let mut worst = Rat::zero();
        let mut ok = true;
        for k in &v.entries()[1..] {
            let x = k.scale_int(&q);
            let pj = x.round_half_toward_zero()?;
            let e = x.sub(&Scalar::int(pj.clone()))?;
            let upper = Scalar::Rat(inv_q.clone()).sub(&e)?.sign();
            let lower = Scalar::Rat(inv_q.clone()).add(&e)?.sign();
            match (upper, lower) {
                (Some(Ordering::Less), _) | (_, Some(Ordering::Less)) => {
                    ok = false;
                    break;
                }
                (Some(_), Some(_)) => {}
                _ => return Err(Error::refine(format!("dirichlet bound at q = {q} is not decided by the enclosure"))),
            }
            let ub = match e.abs()? {
                Scalar::Rat(r) => r,
                other => other.enclose(f).hi().ceil_dyadic(f).min(inv_q.clone()),
            };
            worst = worst.max(ub);
            p.push(pj);
        }
        if ok {
            return Ok(ApproxStep { index: None, big_q: Some(big_q.clone()), q, p, err_bound: worst });
        }
    }
}

/// Divide out the gcd of the entries; signs are kept.
pub fn coprime_reduce(p: &[BigInt]) -> Result<(IntVec, BigInt)> {
    let g = gcd_all(p);
    if g.is_zero() {
        return Err(Error::invalid("cannot reduce the zero vector"));
    }
    Ok((p.iter().map(|x| x / &g).collect(), g))
}

/// Enclosure of a scalar as an interval, for callers that only need bounds.
pub fn enclosure(x: &Scalar, digits: u32) -> Interval {
    x.enclose(digits_to_bits(digits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::QSurd;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn pairs(v: &[(i64, i64)]) -> Vec<(BigInt, BigInt)> {
        v.iter().map(|&(p, q)| (BigInt::from(p), BigInt::from(q))).collect()
    }

    fn sqrt(d: i64) -> Scalar {
        Scalar::sqrt_of(&Rat::int(d)).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let d = DirectionSpec::new(vec![Scalar::int(2), Scalar::int(4)]).unwrap();
        assert_eq!(d.entries(), &[Scalar::one(), Scalar::int(2)]);
        assert_eq!(d.kind(), Irrationality::Rational);

        let g = DirectionSpec::new(vec![Scalar::golden(), Scalar::one()]).unwrap();
        assert_eq!(g.entries()[1], Scalar::golden().sub(&Scalar::one()).unwrap());
        assert_eq!(g.kind(), Irrationality::Quadratic);

        let z = DirectionSpec::new(vec![Scalar::zero(), sqrt(2), Scalar::one()]).unwrap();
        assert_eq!(z.permutation(), &[1, 0, 2]);
        let half_root2 = Scalar::Surd(QSurd::new(Rat::zero(), Rat::frac(1, 2), 2).unwrap());
        assert_eq!(z.entries(), &[Scalar::one(), Scalar::zero(), half_root2]);
        assert_eq!(z.original()[1], Scalar::one());
    }

    #[test]
    fn normalize_rejects_indeterminate() {
        let straddle = Scalar::Interval(Interval::new(Rat::frac(-1, 10), Rat::frac(1, 10)).unwrap());
        let r = DirectionSpec::new(vec![Scalar::zero(), straddle]);
        assert_eq!(r, Err(Error::IndeterminateDirection));
    }

    #[test]
    fn mixed_radicands_become_certified_enclosures() {
        let d = DirectionSpec::new(vec![sqrt(2), sqrt(3), Scalar::one()]).unwrap();
        assert_eq!(d.kind(), Irrationality::Quadratic);
        let e = d.entries()[1].enclose(0);
        assert!(e.lo().square() <= Rat::frac(3, 2) && Rat::frac(3, 2) <= e.hi().square());
        assert!(e.width() < Rat::pow2_neg(190));
    }

    #[test]
    fn direction_json_round_trip() {
        let z = DirectionSpec::new(vec![Scalar::zero(), sqrt(2), Scalar::one()]).unwrap();
        let s = serde_json::to_string(&z).unwrap();
        let back: DirectionSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
        let list: DirectionSpec = serde_json::from_str(r#"["2/1","4/1"]"#).unwrap();
        assert!(list.is_rational());
        let bad = serde_json::from_str::<DirectionSpec>(r#"{"entries":["2/1","4/1"],"kind":"quadratic"}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn convergent_examples() {
        assert_eq!(convergents_2d(&Scalar::golden(), 4).unwrap(), pairs(&[(1, 1), (2, 1), (3, 2), (5, 3)]));
        assert_eq!(convergents_2d(&sqrt(2), 4).unwrap(), pairs(&[(1, 1), (3, 2), (7, 5), (17, 12)]));
        match convergents_2d(&Scalar::Rat(Rat::frac(3, 2)), 1) {
            Err(Error::FiniteExpansion(list)) => assert_eq!(list, pairs(&[(1, 1), (3, 2)])),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn interval_convergents_need_refinement_eventually() {
        let phi = Scalar::Interval(Interval::from_decimal("1.6180339887").unwrap());
        let first = convergents_2d(&phi, 5).unwrap();
        assert_eq!(first, convergents_2d(&Scalar::golden(), 5).unwrap());
        assert!(matches!(convergents_2d(&phi, 60), Err(Error::NeedsRefinement(_))));
    }

    #[test]
    fn fibonacci_convergents_satisfy_strict_bound() {
        let steps = convergent_steps(&Scalar::golden(), 30).unwrap();
        let (mut q, mut p) = (BigInt::one(), BigInt::one());
        for s in &steps {
            // convergent k of phi is F(k+1)/F(k)
            assert_eq!((&s.q, &s.p[1]), (&q, &p));
            (q, p) = (p.clone(), p + q);
            assert!(s.err_bound < Rat::new(1, &s.q * &s.q).unwrap());
            assert!(s.err_bound.is_positive());
        }
    }

    #[test]
    fn simultaneous_examples() {
        let r2 = DirectionSpec::new(vec![Scalar::one(), sqrt(2)]).unwrap();
        let s = simultaneous_approx(&r2, &BigInt::from(3)).unwrap();
        assert_eq!((s.q.clone(), s.p.clone()), (BigInt::from(2), ints(&[2, 3])));
        assert!(s.err_bound <= Rat::frac(1, 3));

        let rat = DirectionSpec::new(vec![Scalar::one(), Scalar::Rat(Rat::frac(1, 2)), Scalar::Rat(Rat::frac(1, 3))]).unwrap();
        let s = simultaneous_approx(&rat, &BigInt::from(6)).unwrap();
        assert_eq!((s.q.clone(), s.p.clone(), s.err_bound.clone()), (BigInt::from(6), ints(&[6, 3, 2]), Rat::zero()));

        let phi = Scalar::golden();
        let g = DirectionSpec::new(vec![Scalar::one(), phi.clone(), phi.add(&Scalar::one()).unwrap()]).unwrap();
        let s = simultaneous_approx(&g, &BigInt::from(5)).unwrap();
        assert!(s.q < BigInt::from(125));
        assert!(s.err_bound <= Rat::frac(1, 5));
        // Oracle: brute force in f64 is reliable at this size.
        let phi_f = (1.0 + 5f64.sqrt()) / 2.0;
        let ok = |q: f64| [phi_f, phi_f + 1.0].iter().all(|k| (k * q - (k * q).round()).abs() <= 0.2 - 1e-9);
        let expect = (1..125).find(|&q| ok(q as f64)).unwrap();
        assert_eq!(s.q, BigInt::from(expect));
    }

    #[test]
    fn ties_round_toward_zero() {
        let v = DirectionSpec::new(vec![Scalar::one(), Scalar::Rat(Rat::frac(1, 2)), Scalar::Rat(Rat::frac(-1, 2))]).unwrap();
        let s = simultaneous_approx(&v, &BigInt::from(2)).unwrap();
        assert_eq!(s.p, ints(&[1, 0, 0]));
        assert_eq!(s.err_bound, Rat::frac(1, 2));
    }

    #[test]
    fn coprime_examples() {
        assert_eq!(coprime_reduce(&ints(&[2, 4, 6])).unwrap(), (ints(&[1, 2, 3]), BigInt::from(2)));
        assert_eq!(coprime_reduce(&ints(&[3, 5, 7])).unwrap(), (ints(&[3, 5, 7]), BigInt::one()));
        assert_eq!(coprime_reduce(&ints(&[6, -4])).unwrap(), (ints(&[3, -2]), BigInt::from(2)));
        assert!(coprime_reduce(&ints(&[0, 0])).is_err());
    }

    #[test]
    fn digits_to_bits_covers_decimal_precision() {
        for d in [1u32, 10, 60, 1000] {
            let bits = digits_to_bits(d);
            assert!(BigInt::one() << bits >= num_traits::pow(BigInt::from(10), d as usize));
        }
    }
}
