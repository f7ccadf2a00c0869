//! Squeezing certificates: search, independent verification, the explicit
//! point map, and cat-map examples.

use crate::diophantine::{
    convergents_partial, coprime_reduce, digits_to_bits, simultaneous_approx, ApproxStep, DirectionSpec, DEFAULT_DIGITS,
};
use crate::error::{Error, Result};
use crate::geometry::{
    add_mixed, delta_upper_bound, ell, fiber_extent, int_dot, norm_sq, theta_upper_bound, Extent, WORK_BITS,
};
use crate::numerics::{int_serde, sqrt_bounds, IntMat, IntVec, Interval, Rat, Scalar};
use crate::unimodular::unimodular_complete;
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Search limits for [`embed`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbedLimits {
    /// Largest convergent index tried for planar directions.
    pub max_index: usize,
    /// Largest `Q = 2^i` tried in higher dimension.
    pub q_max: BigInt,
    /// Decimal digits used for shift and margin rounding.
    pub digits: u32,
}

impl Default for EmbedLimits {
    fn default() -> Self {
        EmbedLimits { max_index: 64, q_max: BigInt::one() << 24, digits: DEFAULT_DIGITS }
    }
}

/// How the fiber matrix was found, plus the diagnostic bounds at that step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(rename = "Q", default, skip_serializing_if = "Option::is_none")]
    pub big_q: Option<String>,
    /// Coprime integer direction in original coordinates, `p A = e_1`.
    #[serde(with = "int_serde::vec")]
    pub p: IntVec,
    pub admissible_r: Rat,
    pub ell: Rat,
    pub theta_ub: Rat,
    pub delta_ub: Rat,
}

/// Witness that `A Delta^n(r) + s` projects into `[-(1 - margin), 1 - margin]`
/// along the unit direction `v / |v|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCertificate {
    pub n: usize,
    pub r: Rat,
    pub direction: DirectionSpec,
    pub fiber_matrix: IntMat,
    pub shift: Vec<Rat>,
    pub margin: Rat,
    pub provenance: Provenance,
}

/// One approximation step turned into a fiber matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub step: ApproxStep,
    /// Coprime tuple in original coordinates.
    pub tuple: IntVec,
    pub matrix: IntMat,
    pub admissible_r: Rat,
}

/// Complete the (coprime-reduced) tuple of `step` and bound its admissible radius.
pub fn candidate_from_step(v: &DirectionSpec, step: ApproxStep) -> Result<Candidate> {
    let (reduced, _) = coprime_reduce(&step.p)?;
    let tuple = v.unpermute_ints(&reduced);
    let matrix = unimodular_complete(&tuple)?;
    let admissible_r = crate::geometry::admissible_r(&matrix, v)?;
    Ok(Candidate { step, tuple, matrix, admissible_r })
}

/// Candidates from the first `max_index` convergents of a planar direction,
/// and the error that cut the expansion short, if any.
pub fn planar_candidates(v: &DirectionSpec, max_index: usize) -> Result<(Vec<Candidate>, Option<Error>)> {
    if v.n() != 2 {
        return Err(Error::invalid("planar candidates need n = 2"));
    }
    let (list, stop) = convergents_partial(&v.entries()[1], max_index);
    let mut out = Vec::with_capacity(list.len());
    for (i, (p, q)) in list.into_iter().enumerate() {
        let step = ApproxStep { index: Some(i + 1), big_q: None, q: q.clone(), p: vec![q, p], err_bound: Rat::zero() };
        out.push(candidate_from_step(v, step)?);
    }
    Ok((out, stop))
}

/// Candidate for `Q` in higher dimension.
pub fn dirichlet_candidate(v: &DirectionSpec, big_q: &BigInt) -> Result<Candidate> {
    let step = simultaneous_approx(v, big_q)?;
    candidate_from_step(v, step)
}

/// Search for a certificate that `P^{2n}(r)` embeds into `Y^{2n}(1, v)`.
pub fn embed(v: &DirectionSpec, r: &Rat, limits: &EmbedLimits) -> Result<EmbeddingCertificate> {
    if v.is_rational() {
        return Err(Error::RationalDirection);
    }
    if !r.is_positive() {
        return Err(Error::invalid("radius must be positive"));
    }
    let mut best: Option<Rat> = None;
    let mut steps = 0usize;
    let track = |c: &Candidate, best: &mut Option<Rat>| {
        if best.as_ref().is_none_or(|b| c.admissible_r > *b) {
            *best = Some(c.admissible_r.clone());
        }
    };
    if v.n() == 2 {
        let (cands, stop) = planar_candidates(v, limits.max_index)?;
        for c in cands {
            steps += 1;
            track(&c, &mut best);
            if r < &c.admissible_r {
                if let Some(cert) = certify(v, r, &c, limits)? {
                    return Ok(cert);
                }
            }
        }
        if let Some(e @ Error::NeedsRefinement(_)) = stop {
            return Err(e);
        }
    } else {
        let mut big_q = BigInt::from(2);
        while big_q <= limits.q_max {
            steps += 1;
            let c = dirichlet_candidate(v, &big_q)?;
            track(&c, &mut best);
            if r < &c.admissible_r {
                if let Some(cert) = certify(v, r, &c, limits)? {
                    return Ok(cert);
                }
            }
            big_q <<= 1;
        }
    }
    Err(Error::SearchExhausted { steps, best_admissible_r: best })
}

/// Upper bound on `max_j |X_j| / |v|` over the given vertex values.
fn unit_sup(values: &[Scalar], n_sq: &Scalar, bits: u32) -> Result<Rat> {
    let nb = n_sq.enclose(bits);
    if !nb.lo().is_positive() {
        return Err(Error::refine("direction norm enclosure contains zero"));
    }
    let mut worst = Rat::zero();
    for x in values {
        let x2 = x.square().enclose(bits);
        worst = worst.max(x2.hi().checked_div(nb.lo())?);
    }
    Ok(sqrt_bounds(&worst, bits).1)
}

/// Center the projected interval of `c` at `r` and emit a certificate if the
/// margin is positive.
fn certify(v: &DirectionSpec, r: &Rat, c: &Candidate, limits: &EmbedLimits) -> Result<Option<EmbeddingCertificate>> {
    let n = v.n();
    let work = digits_to_bits(limits.digits).max(64);
    let ext = fiber_extent(&c.matrix, r, v)?;
    let center = ext.lo.enclose(work).add(&ext.hi.enclose(work)).midpoint() * Rat::frac(1, 2);
    let pivot = v.permutation()[0];
    let dir = v.original();
    // Coarsest dyadic shift that still leaves a positive margin.
    let mut found = None;
    let mut bits = 8;
    while found.is_none() {
        let mut shift = vec![Rat::zero(); n];
        shift[pivot] = -center.floor_dyadic(bits);
        let values = shifted_vertex_values(&c.matrix, r, &shift, &dir)?;
        let gap = Rat::one() - unit_sup(&values, &ext.norm_sq, work)?;
        let margin = (gap * Rat::frac(1, 2)).floor_dyadic(bits);
        if margin.is_positive() {
            found = Some((shift, margin));
        } else if bits >= work {
            return Ok(None);
        }
        bits = (bits * 2).min(work);
    }
    let (shift, margin) = found.expect("loop exits with a value");
    let theta = theta_upper_bound(v, &c.tuple)?;
    let ell_r = ell(&c.matrix, r);
    let provenance = Provenance {
        index: c.step.index,
        big_q: c.step.big_q.as_ref().map(ToString::to_string),
        p: c.tuple.clone(),
        admissible_r: c.admissible_r.clone(),
        delta_ub: delta_upper_bound(&ell_r, &theta)?,
        ell: ell_r,
        theta_ub: theta,
    };
    let cert = EmbeddingCertificate {
        n,
        r: r.clone(),
        direction: v.clone(),
        fiber_matrix: c.matrix.clone(),
        shift,
        margin,
        provenance,
    };
    match verify_certificate(&cert)? {
        Verdict::Accept => Ok(Some(cert)),
        Verdict::Reject { reason, .. } => Err(Error::internal(format!("self-verification rejected: {reason:?}"))),
    }
}

/// `<A u + s, v>` at the vertices `0, r e_1, ..., r e_n`.
fn shifted_vertex_values(a: &IntMat, r: &Rat, shift: &[Rat], v: &[Scalar]) -> Result<Vec<Scalar>> {
    let s_dot = shift
        .iter()
        .zip(v)
        .filter(|(s, _)| !s.is_zero())
        .try_fold(Scalar::zero(), |acc, (s, x)| add_mixed(&acc, &x.scale(s)))?;
    let mut out = vec![s_dot.clone()];
    for j in 0..v.len() {
        let col = int_dot(&a.col(j), v)?.scale(r);
        out.push(add_mixed(&col, &s_dot)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    DimensionMismatch,
    NotUnimodular,
    NonpositiveRadius,
    NonpositiveMargin,
    VertexOutside,
}

/// Outcome of [`verify_certificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject {
        reason: RejectReason,
        /// Failing vertex (0 is the origin, `j` is `r e_j`) and an enclosure of
        /// its unit projection, for vertex failures.
        witness: Option<(usize, Interval)>,
    },
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        match self {
            Verdict::Accept => m.serialize_entry("accept", &true)?,
            Verdict::Reject { reason, witness } => {
                m.serialize_entry("reject", reason)?;
                if let Some((vertex, projection)) = witness {
                    #[derive(Serialize)]
                    struct W<'a> {
                        vertex: usize,
                        projection: &'a Interval,
                    }
                    m.serialize_entry("witness", &W { vertex: *vertex, projection })?;
                }
            }
        }
        m.end()
    }
}

/// Re-check a certificate from scratch.
///
/// For interval directions the vertex bound is certified for every direction
/// in the enclosure box; an undecided comparison is `NeedsRefinement`.
pub fn verify_certificate(cert: &EmbeddingCertificate) -> Result<Verdict> {
    let reject = |reason| Ok(Verdict::Reject { reason, witness: None });
    let n = cert.n;
    let a = &cert.fiber_matrix;
    if n < 1 || cert.direction.n() != n || a.nrows() != n || a.ncols() != n || cert.shift.len() != n {
        return reject(RejectReason::DimensionMismatch);
    }
    if !a.det()?.is_one() {
        return reject(RejectReason::NotUnimodular);
    }
    if !cert.r.is_positive() {
        return reject(RejectReason::NonpositiveRadius);
    }
    if !cert.margin.is_positive() {
        return reject(RejectReason::NonpositiveMargin);
    }
    let v = cert.direction.original();
    let n_sq = norm_sq(&v)?;
    let limit = (Rat::one() - &cert.margin).square();
    let rhs = n_sq.scale(&limit);
    let values = shifted_vertex_values(a, &cert.r, &cert.shift, &v)?;
    for (idx, x) in values.iter().enumerate() {
        // |X| <= (1 - m) |v|  iff  X^2 <= (1 - m)^2 |v|^2, with 1 - m >= 0 checked first.
        let ok = if cert.margin > Rat::one() {
            Some(false)
        } else {
            let lhs = x.square();
            let diff = match rhs.sub(&lhs) {
                Err(Error::MixedRadicand(_, _)) => Scalar::Interval(rhs.enclose(WORK_BITS).sub(&lhs.enclose(WORK_BITS))),
                other => other?,
            };
            match diff.sign() {
                Some(Ordering::Less) => Some(false),
                Some(_) => Some(true),
                None => {
                    // Decide by the interval box alone: sup X^2 vs (1-m)^2 inf |v|^2.
                    let l = lhs.enclose(WORK_BITS);
                    let r = rhs.enclose(WORK_BITS);
                    if l.hi() <= r.lo() {
                        Some(true)
                    } else if l.lo() > r.hi() {
                        Some(false)
                    } else {
                        None
                    }
                }
            }
        };
        match ok {
            Some(true) => {}
            Some(false) => {
                let proj = Extent {
                    lo: x.clone(),
                    hi: x.clone(),
                    width: Scalar::zero(),
                    witnesses: [idx, idx],
                    norm_sq: n_sq.clone(),
                }
                .unit_lo(64);
                return Ok(Verdict::Reject { reason: RejectReason::VertexOutside, witness: Some((idx, proj)) });
            }
            None => return Err(Error::refine(format!("vertex {idx} bound is not decided by the enclosure"))),
        }
    }
    Ok(Verdict::Accept)
}

/// A point of `T*T^n`: base coordinates mod 1 and a fiber vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapPoint {
    pub base: Vec<Rat>,
    pub fiber: Vec<Rat>,
}

fn frac_part(x: &Rat) -> Rat {
    x - Rat::int(x.floor())
}

impl MapPoint {
    /// Reduces base coordinates into `[0, 1)`.
    pub fn new(base: Vec<Rat>, fiber: Vec<Rat>) -> Result<Self> {
        if base.len() != fiber.len() {
            return Err(Error::invalid("base and fiber dimensions differ"));
        }
        Ok(MapPoint { base: base.iter().map(frac_part).collect(), fiber })
    }
}

/// `(A^T)^{-1}`, the base block paired with the fiber block `A`.
pub fn base_block(a: &IntMat) -> Result<IntMat> {
    a.transpose().inv_unimodular()
}

/// `(x, y) -> ((A^T)^{-1} x mod 1, A y + s)`.
pub fn apply_map(cert: &EmbeddingCertificate, pt: &MapPoint) -> Result<MapPoint> {
    let a = &cert.fiber_matrix;
    if pt.base.len() != a.ncols() || pt.fiber.len() != a.ncols() || cert.shift.len() != a.nrows() {
        return Err(Error::invalid("point and certificate dimensions differ"));
    }
    let base = base_block(a)?.mul_rat_vec(&pt.base)?;
    let fiber: Vec<Rat> = a.mul_rat_vec(&pt.fiber)?.into_iter().zip(&cert.shift).map(|(y, s)| y + s).collect();
    MapPoint::new(base, fiber)
}

/// A tangent displacement `(dx, dy)`.
pub type Displacement = (Vec<Rat>, Vec<Rat>);

/// `sum_i dx1_i dy2_i - dx2_i dy1_i`.
pub fn symplectic_pairing(d1: &Displacement, d2: &Displacement) -> Rat {
    let a: Rat = d1.0.iter().zip(&d2.1).map(|(x, y)| x * y).sum();
    let b: Rat = d2.0.iter().zip(&d1.1).map(|(x, y)| x * y).sum();
    a - b
}

/// The differential of [`apply_map`] applied to a displacement.
pub fn push_displacement(a: &IntMat, d: &Displacement) -> Result<Displacement> {
    Ok((base_block(a)?.mul_rat_vec(&d.0)?, a.mul_rat_vec(&d.1)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatKind {
    Cat2,
    Cat3,
}

pub fn cat_matrix(kind: CatKind) -> IntMat {
    match kind {
        CatKind::Cat2 => IntMat::from_i64(&[&[2, 1], &[1, 1]]),
        CatKind::Cat3 => IntMat::from_i64(&[&[2, 1, 3], &[3, 2, 5], &[2, 1, 4]]),
    }
}

/// `lambda^3 - 8 lambda^2 + 6 lambda - 1`, the characteristic polynomial of cat3.
fn cat3_charpoly(x: &Rat) -> Rat {
    let x2 = x.square();
    &x2 * x - Rat::int(8) * &x2 + Rat::int(6) * x - Rat::one()
}

/// Enclosure of the dominant eigenvalue of cat3 (about 7.184), of width at most `2^-bits`.
pub fn cat3_dominant_eigenvalue(bits: u32) -> Interval {
    // f(7) < 0 < f(8) and f is increasing there.
    let (mut lo, mut hi) = (Rat::int(7), Rat::int(8));
    let eps = Rat::pow2_neg(bits);
    while &hi - &lo > eps {
        let mid = (&lo + &hi) * Rat::frac(1, 2);
        match cat3_charpoly(&mid).signum() {
            Ordering::Less => lo = mid,
            Ordering::Greater => hi = mid,
            Ordering::Equal => return Interval::point(mid),
        }
    }
    Interval::new(lo, hi).expect("bisection keeps lo <= hi")
}

/// Enclosure of the dominant eigenvector `(3l - 1, 5l - 1, l^2 - 4l + 1)` with
/// endpoints on the `10^-digits` grid.
pub fn cat3_dominant_direction(digits: u32) -> Result<DirectionSpec> {
    let lam = cat3_dominant_eigenvalue(digits_to_bits(digits) + 16);
    let l = |k: i64, c: i64| lam.scale(&Rat::int(k)).add(&Interval::point(Rat::int(c)));
    let third = lam.square().add(&lam.scale(&Rat::int(-4))).add(&Interval::point(Rat::one()));
    let ten = num_traits::pow(BigInt::from(10), digits as usize);
    let to_grid = |iv: Interval| -> Result<Scalar> {
        let s = Rat::int(ten.clone());
        let lo = Rat::new((iv.lo() * &s).floor(), ten.clone())?;
        let hi = Rat::new((iv.hi() * &s).ceil(), ten.clone())?;
        Ok(Scalar::Interval(Interval::new(lo, hi)?))
    };
    DirectionSpec::new(vec![to_grid(l(3, -1))?, to_grid(l(5, -1))?, to_grid(third)?])
}

/// `A^k` for `k >= 0`.
pub fn mat_pow(a: &IntMat, k: u32) -> Result<IntMat> {
    let mut out = IntMat::identity(a.nrows());
    for _ in 0..k {
        out = out.mul(a)?;
    }
    Ok(out)
}

/// `fiber_extent(A^{-k}, r, v)`.
pub fn iterate_width(a: &IntMat, k: u32, r: &Rat, v: &DirectionSpec) -> Result<Extent> {
    let inv = a.inv_unimodular()?;
    fiber_extent(&mat_pow(&inv, k)?, r, v)
}
