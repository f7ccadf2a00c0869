//! Barcodes: finite multisets of half-open intervals, bottleneck distance,
//! endpoint multisets and the minimal marked spectrum.

use crate::error::{Error, Result};
use crate::numerics::Rat;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Right endpoint of a bar. `Finite` sorts before `Infinite`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Death {
    Finite(Rat),
    Infinite,
}

impl fmt::Display for Death {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Death::Finite(x) => write!(f, "{x}"),
            Death::Infinite => f.write_str("inf"),
        }
    }
}

impl Death {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "infinity" | "+infinity" | "∞" => Ok(Death::Infinite),
            t => Ok(Death::Finite(Rat::parse(t)?)),
        }
    }
}

impl Serialize for Death {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Death {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Death::parse(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// A half-open interval `[birth, death)` with `birth < death`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Bar {
    birth: Rat,
    death: Death,
}

impl Bar {
    pub fn new(birth: Rat, death: Death) -> Result<Self> {
        if let Death::Finite(d) = &death {
            if d <= &birth {
                return Err(Error::invalid(format!("bar [{birth}, {d}) is empty")));
            }
        }
        Ok(Bar { birth, death })
    }

    pub fn finite(birth: Rat, death: Rat) -> Result<Self> {
        Bar::new(birth, Death::Finite(death))
    }

    pub fn infinite(birth: Rat) -> Self {
        Bar { birth, death: Death::Infinite }
    }

    pub fn birth(&self) -> &Rat {
        &self.birth
    }

    pub fn death(&self) -> &Death {
        &self.death
    }

    pub fn is_infinite(&self) -> bool {
        self.death == Death::Infinite
    }

    /// `(death - birth) / 2`, or `None` for an infinite bar.
    pub fn half_length(&self) -> Option<Rat> {
        match &self.death {
            Death::Finite(d) => Some((d - &self.birth) * Rat::frac(1, 2)),
            Death::Infinite => None,
        }
    }
}

impl<'de> Deserialize<'de> for Bar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            birth: Rat,
            death: Death,
        }
        let raw = Raw::deserialize(d)?;
        Bar::new(raw.birth, raw.death).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Barcode {
    pub bars: Vec<Bar>,
}

impl Barcode {
    pub fn new(bars: Vec<Bar>) -> Self {
        Barcode { bars }
    }

    /// Finite bars from `(birth, death)` pairs.
    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        pairs.iter().map(|&(b, d)| Bar::finite(Rat::int(b), Rat::int(d))).collect::<Result<_>>().map(Barcode::new)
    }

    pub fn len(&self) -> usize {
        self.bars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    fn sorted(&self) -> Vec<Bar> {
        let mut v = self.bars.clone();
        v.sort();
        v
    }
}

/// Finite endpoints (sorted, with multiplicity) and the number of infinite bars.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoints {
    pub finite: Vec<Rat>,
    pub infinite: usize,
}

pub fn endpoints_multiset(b: &Barcode) -> Endpoints {
    let mut finite = Vec::with_capacity(2 * b.len());
    let mut infinite = 0;
    for bar in &b.bars {
        finite.push(bar.birth.clone());
        match &bar.death {
            Death::Finite(d) => finite.push(d.clone()),
            Death::Infinite => infinite += 1,
        }
    }
    finite.sort();
    Endpoints { finite, infinite }
}

/// Least birth among infinite bars.
pub fn min_marked_spectrum(b: &Barcode) -> Option<Rat> {
    b.bars.iter().filter(|x| x.is_infinite()).map(|x| x.birth.clone()).min()
}

/// Multiset equality.
pub fn barcodes_equal(a: &Barcode, b: &Barcode) -> bool {
    a.len() == b.len() && a.sorted() == b.sorted()
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Finite(Rat),
    Infinite,
}

impl Distance {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Distance::Finite(x) => Some(x),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(x) => write!(f, "{x}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Distance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match Death::deserialize(d)? {
            Death::Finite(x) => Distance::Finite(x),
            Death::Infinite => Distance::Infinite,
        })
    }
}

/// Finite bars as `(birth, death)` pairs.
type Pairs = Vec<(Rat, Rat)>;

fn split(b: &Barcode) -> (Pairs, Vec<Rat>) {
    let mut fin = Vec::new();
    let mut inf = Vec::new();
    for bar in &b.bars {
        match &bar.death {
            Death::Finite(d) => fin.push((bar.birth.clone(), d.clone())),
            Death::Infinite => inf.push(bar.birth.clone()),
        }
    }
    (fin, inf)
}

fn half(x: &(Rat, Rat)) -> Rat {
    (&x.1 - &x.0) * Rat::frac(1, 2)
}

fn pair_cost(x: &(Rat, Rat), y: &(Rat, Rat)) -> Rat {
    (&x.0 - &y.0).abs().max((&x.1 - &y.1).abs())
}

/// Bars in the brute-force range.
pub const BRUTE_FORCE_LIMIT: usize = 10;

/// Bottleneck distance. Infinite bars must be matched with infinite bars at
/// cost `|b - b'|`; unequal infinite-bar counts give `Infinite`.
pub fn bottleneck_distance(a: &Barcode, b: &Barcode) -> Distance {
    bottleneck_with(a, b, |x, y| {
        if x.len() + y.len() <= BRUTE_FORCE_LIMIT {
            brute_force_finite(x, y)
        } else {
            matching_finite(x, y)
        }
    })
}

/// Bottleneck distance by exhaustive search over partial matchings.
pub fn bottleneck_brute_force(a: &Barcode, b: &Barcode) -> Distance {
    bottleneck_with(a, b, brute_force_finite)
}

/// Bottleneck distance by binary search over candidate values with a
/// bipartite feasibility test.
pub fn bottleneck_matching(a: &Barcode, b: &Barcode) -> Distance {
    bottleneck_with(a, b, matching_finite)
}

fn bottleneck_with(a: &Barcode, b: &Barcode, finite: impl Fn(&Pairs, &Pairs) -> Rat) -> Distance {
    let (fa, mut ia) = split(a);
    let (fb, mut ib) = split(b);
    if ia.len() != ib.len() {
        return Distance::Infinite;
    }
    // On a line, sorted order minimizes the largest displacement.
    ia.sort();
    ib.sort();
    let inf_cost = ia.iter().zip(&ib).map(|(x, y)| (x - y).abs()).max().unwrap_or_else(Rat::zero);
    Distance::Finite(inf_cost.max(finite(&fa, &fb)))
}

fn brute_force_finite(a: &Pairs, b: &Pairs) -> Rat {
    fn go(i: usize, a: &Pairs, b: &Pairs, used: &mut [bool], cur: &Rat, best: &mut Rat) {
        if cur >= best {
            return;
        }
        if i == a.len() {
            let rest = b.iter().zip(used.iter()).filter(|(_, u)| !**u).map(|(y, _)| half(y)).max();
            let total = rest.map_or_else(|| cur.clone(), |r| r.max(cur.clone()));
            if &total < best {
                *best = total;
            }
            return;
        }
        go(i + 1, a, b, used, &cur.clone().max(half(&a[i])), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, a, b, used, &cur.clone().max(pair_cost(&a[i], &b[j])), best);
                used[j] = false;
            }
        }
    }
    // Leaving everything unmatched is always a valid upper bound.
    let mut best = a.iter().chain(b).map(half).max().unwrap_or_else(Rat::zero);
    let mut used = vec![false; b.len()];
    go(0, a, b, &mut used, &Rat::zero(), &mut best);
    best
}

fn matching_finite(a: &Pairs, b: &Pairs) -> Rat {
    let mut cands: Vec<Rat> = vec![Rat::zero()];
    cands.extend(a.iter().chain(b).map(half));
    for x in a {
        for y in b {
            cands.push((&x.0 - &y.0).abs());
            cands.push((&x.1 - &y.1).abs());
        }
    }
    cands.sort();
    cands.dedup();
    // The largest half-length is feasible, so the search always lands.
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(a, b, &cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo].clone()
}

/// Perfect matching between `a ∪ diag(b)` and `b ∪ diag(a)` using only edges of cost at most `eps`.
fn feasible(a: &Pairs, b: &Pairs, eps: &Rat) -> bool {
    let (na, nb) = (a.len(), b.len());
    let size = na + nb;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if &pair_cost(x, y) <= eps {
                adj[i].push(j);
            }
        }
        if &half(x) <= eps {
            adj[i].push(nb + i);
        }
    }
    for (j, y) in b.iter().enumerate() {
        let row = na + j;
        if &half(y) <= eps {
            adj[row].push(j);
        }
        adj[row].extend(nb..nb + na);
    }
    let mut owner: Vec<Option<usize>> = vec![None; size];
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if owner[v].is_none_or(|w| augment(w, adj, seen, owner)) {
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    (0..size).all(|u| augment(u, &adj, &mut vec![false; size], &mut owner))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bc(pairs: &[(i64, i64)]) -> Barcode {
        Barcode::from_pairs(pairs).unwrap()
    }

    #[test]
    fn endpoints() {
        let e = endpoints_multiset(&bc(&[(1, 2), (3, 4)]));
        assert_eq!(e.finite, [1, 2, 3, 4].map(Rat::int).to_vec());
        assert_eq!(e.infinite, 0);
        assert_eq!(endpoints_multiset(&Barcode::default()), Endpoints { finite: vec![], infinite: 0 });
        let b = Barcode::new(vec![Bar::infinite(Rat::int(3)), Bar::finite(Rat::int(1), Rat::int(2)).unwrap()]);
        let e = endpoints_multiset(&b);
        assert_eq!((e.finite, e.infinite), ([1, 2, 3].map(Rat::int).to_vec(), 1));
    }

    #[test]
    fn spectrum() {
        let one = Bar::finite(Rat::int(1), Rat::int(2)).unwrap();
        assert_eq!(min_marked_spectrum(&Barcode::new(vec![Bar::infinite(Rat::int(3)), one.clone()])), Some(Rat::int(3)));
        assert_eq!(min_marked_spectrum(&Barcode::new(vec![one])), None);
        let b = Barcode::new(vec![
            Bar::infinite(Rat::int(5)),
            Bar::infinite(Rat::int(3)),
            Bar::finite(Rat::int(4), Rat::int(9)).unwrap(),
        ]);
        assert_eq!(min_marked_spectrum(&b), Some(Rat::int(3)));
    }

    #[test]
    fn distances() {
        let b1 = bc(&[(1, 2), (3, 4)]);
        let b2 = bc(&[(1, 4), (2, 3)]);
        assert_eq!(bottleneck_distance(&b1, &b1), Distance::Finite(Rat::zero()));
        assert_eq!(bottleneck_distance(&b1, &b2), Distance::Finite(Rat::frac(3, 2)));
        assert_eq!(bottleneck_matching(&b1, &b2), Distance::Finite(Rat::frac(3, 2)));
        assert_eq!(bottleneck_distance(&bc(&[(0, 2)]), &Barcode::default()), Distance::Finite(Rat::one()));
        assert!(barcodes_equal(&b1, &bc(&[(3, 4), (1, 2)])));
        assert!(!barcodes_equal(&b1, &b2));
        assert!(barcodes_equal(&Barcode::default(), &Barcode::default()));

        let inf = Barcode::new(vec![Bar::infinite(Rat::int(2))]);
        assert_eq!(bottleneck_distance(&inf, &b1), Distance::Infinite);
        let inf2 = Barcode::new(vec![Bar::infinite(Rat::int(5))]);
        assert_eq!(bottleneck_distance(&inf, &inf2), Distance::Finite(Rat::int(3)));
    }

    #[test]
    fn json_shape() {
        let b = Barcode::new(vec![Bar::finite(Rat::int(1), Rat::int(2)).unwrap(), Bar::infinite(Rat::int(3))]);
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, r#"{"bars":[{"birth":"1/1","death":"2/1"},{"birth":"3/1","death":"inf"}]}"#);
        assert_eq!(serde_json::from_str::<Barcode>(&json).unwrap(), b);
        assert!(serde_json::from_str::<Barcode>(r#"{"bars":[{"birth":"2","death":"2"}]}"#).is_err());
        assert!(Bar::finite(Rat::int(3), Rat::int(1)).is_err());
    }
}
