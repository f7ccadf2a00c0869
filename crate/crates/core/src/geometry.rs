//! Fiber geometry: simplices, cylinders, projected widths and the diagnostic
//! bounds on chord length, tilt angle and width excess.

use crate::diophantine::DirectionSpec;
use crate::error::{Error, Result};
use crate::numerics::{sqrt_bounds, IntMat, IntVec, Interval, Rat, Scalar};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;

/// Working precision (bits) for enclosures of exact values that cannot be
/// combined exactly.
pub const WORK_BITS: u32 = 256;

/// `Delta^n(r) = {x >= 0, sum x_j <= r}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexSpec {
    pub n: usize,
    pub r: Rat,
}

impl SimplexSpec {
    pub fn new(n: usize, r: Rat) -> Result<Self> {
        if n == 0 || !r.is_positive() {
            return Err(Error::invalid("simplex needs n >= 1 and r > 0"));
        }
        Ok(SimplexSpec { n, r })
    }

    /// `0, r e_1, ..., r e_n`.
    pub fn vertices(&self) -> Vec<Vec<Rat>> {
        let mut out = vec![vec![Rat::zero(); self.n]];
        for j in 0..self.n {
            let mut v = vec![Rat::zero(); self.n];
            v[j] = self.r.clone();
            out.push(v);
        }
        out
    }
}

/// Fat cylinder `Y(halfwidth, v)`: fibers constrained only along `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderSpec {
    pub halfwidth: Rat,
    pub direction: DirectionSpec,
}

impl CylinderSpec {
    pub fn new(halfwidth: Rat, direction: DirectionSpec) -> Result<Self> {
        if !halfwidth.is_positive() {
            return Err(Error::invalid("cylinder half-width must be positive"));
        }
        Ok(CylinderSpec { halfwidth, direction })
    }
}

/// Thin cylinder `X(radius, w)`: fibers unbounded only along `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThinCylinderSpec {
    pub radius: Rat,
    pub direction: DirectionSpec,
}

impl ThinCylinderSpec {
    pub fn new(radius: Rat, direction: DirectionSpec) -> Result<Self> {
        if direction.n() < 3 || !radius.is_positive() {
            return Err(Error::invalid("thin cylinder needs n >= 3 and a positive radius"));
        }
        Ok(ThinCylinderSpec { radius, direction })
    }
}

/// `a + b`, falling back to enclosures when the radicands differ.
pub fn add_mixed(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    match a.add(b) {
        Err(Error::MixedRadicand(_, _)) => Ok(Scalar::Interval(a.enclose(WORK_BITS).add(&b.enclose(WORK_BITS)))),
        other => other,
    }
}

/// `a * b`, falling back to enclosures when the radicands differ.
pub fn mul_mixed(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    match a.mul(b) {
        Err(Error::MixedRadicand(_, _)) => Ok(Scalar::Interval(a.enclose(WORK_BITS).mul(&b.enclose(WORK_BITS)))),
        other => other,
    }
}

/// `sum_i c_i v_i` for integer `c`.
pub fn int_dot(c: &[BigInt], v: &[Scalar]) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for (ci, vi) in c.iter().zip(v) {
        if !ci.is_zero() {
            acc = add_mixed(&acc, &vi.scale_int(ci))?;
        }
    }
    Ok(acc)
}

/// `sum v_i^2`.
pub fn norm_sq(v: &[Scalar]) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for x in v {
        acc = add_mixed(&acc, &x.square())?;
    }
    Ok(acc)
}

/// Certified `a < b`, `a > b` or undecided.
fn compare(a: &Scalar, b: &Scalar) -> Result<Option<Ordering>> {
    let diff = match a.sub(b) {
        Err(Error::MixedRadicand(_, _)) => Scalar::Interval(a.enclose(WORK_BITS).sub(&b.enclose(WORK_BITS))),
        other => other?,
    };
    Ok(diff.sign())
}

/// Extremes of `<A x, v>` over `Delta^n(r)`, with `v` the (unnormalized)
/// direction in original order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extent {
    pub lo: Scalar,
    pub hi: Scalar,
    pub width: Scalar,
    /// Vertices attaining `lo` and `hi`: 0 is the origin, `j` is `r e_j`.
    pub witnesses: [usize; 2],
    /// `|v|^2`, to normalize widths to the unit direction.
    pub norm_sq: Scalar,
}

impl Extent {
    /// Enclosure of `x / |v|`.
    fn unit(&self, x: &Scalar, bits: u32) -> Interval {
        let n = self.norm_sq.enclose(bits + 8);
        let root = n.sqrt(bits + 8).expect("norm is nonnegative");
        let e = x.enclose(bits + 8);
        e.div(&root).map(|q| q.round_outward(bits)).unwrap_or(e)
    }

    pub fn unit_lo(&self, bits: u32) -> Interval {
        self.unit(&self.lo, bits)
    }

    pub fn unit_hi(&self, bits: u32) -> Interval {
        self.unit(&self.hi, bits)
    }

    /// Enclosure of the width along the unit direction.
    pub fn unit_width(&self, bits: u32) -> Interval {
        self.unit(&self.width, bits)
    }

    /// `width^2 - c^2 |v|^2`, whose sign compares the unit width with `c`.
    pub fn width_excess(&self, c: &Rat) -> Result<Scalar> {
        let w2 = self.width.square();
        let rhs = self.norm_sq.scale(&c.square());
        match w2.sub(&rhs) {
            Err(Error::MixedRadicand(_, _)) => {
                Ok(Scalar::Interval(w2.enclose(WORK_BITS).sub(&rhs.enclose(WORK_BITS))))
            }
            other => other,
        }
    }

    /// Certified: the unit width is strictly below `c`.
    pub fn unit_width_below(&self, c: &Rat) -> Result<bool> {
        match self.width_excess(c)?.sign() {
            Some(Ordering::Less) => Ok(true),
            Some(_) => Ok(false),
            None => Err(Error::refine("unit width comparison is not decided")),
        }
    }
}

impl Serialize for Extent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            lo: Interval,
            hi: Interval,
            width: Interval,
            witnesses: [usize; 2],
        }
        let bits = 64;
        Out { lo: self.unit_lo(bits), hi: self.unit_hi(bits), width: self.unit_width(bits), witnesses: self.witnesses }
            .serialize(s)
    }
}

/// `r (A^T v)_j`: the value of `<A x, v>` at vertex `r e_j`.
pub fn vertex_values(a: &IntMat, r: &Rat, v: &[Scalar]) -> Result<Vec<Scalar>> {
    let n = v.len();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::invalid("matrix and direction dimensions differ"));
    }
    (0..n).map(|j| Ok(int_dot(&a.col(j), v)?.scale(r))).collect()
}

/// Range of `<A x, v>` over the simplex, taken over its vertices.
///
/// When an interval comparison is undecided the extreme is enclosed by the
/// hull rule, which stays valid for every direction in the enclosure.
pub fn fiber_extent(a: &IntMat, r: &Rat, v: &DirectionSpec) -> Result<Extent> {
    if !r.is_positive() {
        return Err(Error::invalid("simplex radius must be positive"));
    }
    let dir = v.original();
    let vals = vertex_values(a, r, &dir)?;
    let mut lo = (Scalar::zero(), 0usize);
    let mut hi = (Scalar::zero(), 0usize);
    for (j, x) in vals.into_iter().enumerate() {
        match compare(&x, &lo.0)? {
            Some(Ordering::Less) => lo = (x.clone(), j + 1),
            Some(_) => {}
            None => {
                let (a, b) = (x.enclose(WORK_BITS), lo.0.enclose(WORK_BITS));
                let w = if a.lo() < b.lo() { j + 1 } else { lo.1 };
                lo = (Scalar::Interval(a.min(&b)), w);
            }
        }
        match compare(&x, &hi.0)? {
            Some(Ordering::Greater) => hi = (x, j + 1),
            Some(_) => {}
            None => {
                let (a, b) = (x.enclose(WORK_BITS), hi.0.enclose(WORK_BITS));
                let w = if a.hi() > b.hi() { j + 1 } else { hi.1 };
                hi = (Scalar::Interval(a.max(&b)), w);
            }
        }
    }
    let width = match hi.0.sub(&lo.0) {
        Err(Error::MixedRadicand(_, _)) => Scalar::Interval(hi.0.enclose(WORK_BITS).sub(&lo.0.enclose(WORK_BITS))),
        other => other?,
    };
    Ok(Extent { lo: lo.0, hi: hi.0, width, witnesses: [lo.1, hi.1], norm_sq: norm_sq(&dir)? })
}

fn max_col_norm_sq(a: &IntMat) -> BigInt {
    (0..a.ncols()).map(|j| a.col(j).iter().map(|x| x * x).sum::<BigInt>()).max().unwrap_or_default()
}

/// Relative precision of chord-length square roots, about `10^-6`.
const ELL_BITS: u32 = 20;

/// Upper bound on `2 max_{x in Delta(r)} |A x|`.
pub fn ell(a: &IntMat, r: &Rat) -> Rat {
    ell_from_r_sq(a, &r.square())
}

/// [`ell`] with the radius given by its square, for radii like `|p|`.
pub fn ell_from_r_sq(a: &IntMat, r_sq: &Rat) -> Rat {
    let m = Rat::int(max_col_norm_sq(a)) * r_sq;
    Rat::int(2) * sqrt_bounds(&m, ELL_BITS).1
}

/// Upper bound on the angle between the lines through `v` and through `p`
/// (original coordinates), from `tan theta = |v x p| / |<v, p>|`.
///
/// Returns 2 (above any line angle) when `<v, p>` is not certified nonzero.
pub fn theta_upper_bound(v: &DirectionSpec, p: &[BigInt]) -> Result<Rat> {
    let dir = v.original();
    if p.len() != dir.len() {
        return Err(Error::invalid("direction and tuple dimensions differ"));
    }
    if p.iter().all(Zero::is_zero) {
        return Err(Error::invalid("zero tuple has no direction"));
    }
    let dot = int_dot(p, &dir)?;
    // |v x p|^2 by the Lagrange identity: sum_{i<j} (v_i p_j - v_j p_i)^2.
    let mut cross = Scalar::zero();
    for i in 0..dir.len() {
        for j in i + 1..dir.len() {
            let t = match dir[i].scale_int(&p[j]).sub(&dir[j].scale_int(&p[i])) {
                Err(Error::MixedRadicand(_, _)) => Scalar::Interval(
                    dir[i].enclose(WORK_BITS).scale(&Rat::int(p[j].clone())).sub(&dir[j].enclose(WORK_BITS).scale(&Rat::int(p[i].clone()))),
                ),
                other => other?,
            };
            cross = add_mixed(&cross, &t.square())?;
        }
    }
    if cross.sign() == Some(Ordering::Equal) {
        return Ok(Rat::zero());
    }
    if matches!(dot.sign(), None | Some(Ordering::Equal)) {
        return Ok(Rat::int(2));
    }
    // tan^2 upper bound as sup(cross) / inf(dot^2), then a rational sqrt upper bound.
    let bits = 64 + 4 * p.iter().map(|x| x.bits()).max().unwrap_or(0) as u32;
    let c = cross.enclose(bits);
    let d = dot.square().enclose(bits);
    if !d.lo().is_positive() {
        return Ok(Rat::int(2));
    }
    let tan_sq = c.hi().checked_div(d.lo())?;
    let ub = sqrt_bounds(&tan_sq, 64).1;
    Ok(ub.min(Rat::int(2)))
}

/// `ell * theta`, bounding `ell sin(theta) + cos(theta) - 1` on `[0, theta]`.
pub fn delta_upper_bound(ell: &Rat, theta_ub: &Rat) -> Result<Rat> {
    if theta_ub.is_negative() || ell.is_negative() {
        return Err(Error::invalid("delta bound needs nonnegative inputs"));
    }
    Ok(ell * theta_ub)
}

/// Rational lower bound on `sup{r : unit width of <A Delta(r), v> < 2}`.
///
/// The bound may equal the supremum, so callers need `r < admissible_r`.
pub fn admissible_r(a: &IntMat, v: &DirectionSpec) -> Result<Rat> {
    let e = fiber_extent(a, &Rat::one(), v)?;
    if e.width.sign() == Some(Ordering::Equal) {
        return Err(Error::internal("zero projected width"));
    }
    // r* = sqrt(4 |v|^2 / width^2)
    let bits = 96;
    let w = e.width.square();
    let ratio = match e.norm_sq.scale(&Rat::int(4)).div(&w) {
        Ok(s) => s,
        Err(Error::MixedRadicand(_, _)) | Err(Error::NeedsRefinement(_)) => {
            let n = e.norm_sq.enclose(WORK_BITS).scale(&Rat::int(4));
            Scalar::Interval(n.div(&w.enclose(WORK_BITS))?)
        }
        Err(err) => return Err(err),
    };
    let lo = ratio.enclose(bits).lo().clone();
    if !lo.is_positive() {
        return Err(Error::refine("projected width enclosure too wide"));
    }
    Ok(sqrt_bounds(&lo, bits).0)
}

/// Nonzero integer `z` with `|z|_inf <= bound` and `z . w = 0`, of least
/// Euclidean norm (ties broken lexicographically, first nonzero entry positive).
pub fn shortest_orthogonal(w: &DirectionSpec, bound: &BigInt) -> Result<Option<IntVec>> {
    if bound < &BigInt::from(1) {
        return Err(Error::invalid("bound must be at least 1"));
    }
    let dir = w.original();
    let n = dir.len();
    let pivot = w.permutation()[0];
    let others: Vec<usize> = (0..n).filter(|&j| j != pivot).collect();
    let mut z = vec![BigInt::zero(); n];
    let mut best: Option<(BigInt, IntVec)> = None;
    let mut counter: Vec<BigInt> = vec![-bound.clone(); others.len()];
    loop {
        if counter.iter().any(|c| !c.is_zero()) {
            for (k, &j) in others.iter().enumerate() {
                z[j] = counter[k].clone();
            }
            if let Some(zp) = pivot_solution(&dir, &z, pivot, bound)? {
                z[pivot] = zp;
                let mut cand = z.clone();
                if cand.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
                    cand.iter_mut().for_each(|x| *x = -&*x);
                }
                let nsq: BigInt = cand.iter().map(|x| x * x).sum();
                let better = match &best {
                    None => true,
                    Some((bn, bz)) => nsq < *bn || (nsq == *bn && cand < *bz),
                };
                if better {
                    best = Some((nsq, cand));
                }
            }
        }
        // odometer
        let mut k = 0;
        loop {
            if k == counter.len() {
                return Ok(best.map(|b| b.1));
            }
            if &counter[k] < bound {
                counter[k] += 1;
                break;
            }
            counter[k] = -bound.clone();
            k += 1;
        }
    }
}

/// The integer `z_pivot` making `z . w = 0` (the pivot entry of `w` is 1), if any.
fn pivot_solution(dir: &[Scalar], z: &[BigInt], pivot: usize, bound: &BigInt) -> Result<Option<BigInt>> {
    let mut s = Scalar::zero();
    for (j, (zj, vj)) in z.iter().zip(dir).enumerate() {
        if j != pivot && !zj.is_zero() {
            s = add_mixed(&s, &vj.scale_int(zj))?;
        }
    }
    match &s {
        Scalar::Rat(r) => Ok((r.is_integer() && r.numer().abs() <= *bound).then(|| -r.numer())),
        Scalar::Surd(_) => Ok(None),
        Scalar::Interval(iv) => {
            let (a, b) = (iv.lo().ceil(), iv.hi().floor());
            if a > b || b < -bound.clone() || a > *bound {
                Ok(None)
            } else {
                Err(Error::refine("orthogonality is not decided by the enclosure"))
            }
        }
    }
}

/// Helper for tests and callers holding a plain matrix and radius.
pub fn unit_width(a: &IntMat, r: &Rat, v: &DirectionSpec, bits: u32) -> Result<Interval> {
    Ok(fiber_extent(a, r, v)?.unit_width(bits))
}
