//! Bounded-entry unimodular completion of coprime integer tuples.
//!
//! Given coprime `p`, produce `A` in `SL_n(Z)` with `p A = e_1` and every
//! `|a_ij| <= 2^(n-2) max|p_k|` (for `n >= 3`; `max|p_k|` for `n = 2`).

use crate::error::{Error, Result};
use crate::numerics::{ext_gcd, gcd_all, int_serde, IntMat, IntVec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// `[[a, -q], [c, p]]` with `a p + c q = 1`.
pub fn bezout_matrix_2d(p: &BigInt, q: &BigInt) -> Result<IntMat> {
    let (g, a, c) = ext_gcd(p, q)?;
    if !g.is_one() {
        return Err(Error::invalid(format!("({p}, {q}) is not coprime")));
    }
    IntMat::from_rows(vec![vec![a, -q], vec![c, p.clone()]])
}

/// The integer sequences used to build `B'` (1-based names, 0-based storage).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxSequences {
    /// `g[k-1] = gcd(p_1, ..., p_k)`.
    #[serde(with = "int_serde::vec")]
    pub g: IntVec,
    /// `d[i-1] = g_{i+1} / g_{i+2}` for `i = 1..n-2`.
    #[serde(with = "int_serde::vec")]
    pub d: IntVec,
    /// `b_1 = p_1 / g_2`, `b_i = p_i / g_i`.
    #[serde(with = "int_serde::vec")]
    pub b: IntVec,
    /// `b_1 m_1 + b_2 m_2 = 1` and `d_i t_i + b_{i+2} m_{i+2} = 1`.
    #[serde(with = "int_serde::vec")]
    pub m: IntVec,
    #[serde(with = "int_serde::vec")]
    pub t: IntVec,
}

/// `B'` with first row `p` and determinant 1, plus the sequences it was built from.
///
/// Expects `p` coprime with `p_1 > 0` and every entry nonnegative.
pub fn build_bprime(p: &[BigInt]) -> Result<(IntMat, AuxSequences)> {
    let n = p.len();
    if n < 3 {
        return Err(Error::invalid("build_bprime needs n >= 3"));
    }
    if !gcd_all(p).is_one() {
        return Err(Error::invalid("tuple is not coprime"));
    }
    if !p[0].is_positive() || p.iter().any(Signed::is_negative) {
        return Err(Error::invalid("build_bprime expects a nonnegative tuple with positive first entry"));
    }
    let mut g = Vec::with_capacity(n);
    let mut acc = BigInt::zero();
    for x in p {
        acc = acc.gcd(x);
        g.push(acc.clone());
    }
    let d: IntVec = (1..=n - 2).map(|i| &g[i] / &g[i + 1]).collect();
    let mut b: IntVec = vec![&p[0] / &g[1]];
    b.extend((1..n).map(|i| &p[i] / &g[i]));

    let mut m = vec![BigInt::zero(); n];
    let mut t = vec![BigInt::zero(); n - 2];
    let (one, m1, m2) = ext_gcd(&b[0], &b[1])?;
    if !one.is_one() {
        return Err(Error::internal("b_1 and b_2 are not coprime"));
    }
    (m[0], m[1]) = (m1, m2);
    for i in 0..n - 2 {
        let (one, ti, mi) = ext_gcd(&d[i], &b[i + 2])?;
        if !one.is_one() {
            return Err(Error::internal("d_i and b_{i+2} are not coprime"));
        }
        (t[i], m[i + 2]) = (ti, mi);
    }

    let mut bp = IntMat::zeros(n, n);
    for (j, x) in p.iter().enumerate() {
        bp.set(0, j, x.clone());
    }
    bp.set(1, 0, -&m[1]);
    bp.set(1, 1, m[0].clone());
    check_stage(&bp, p, &g, 2)?;
    for k in 1..=n - 2 {
        // Row k+2 (1-based): -m_{k+2} p_j / g_{k+1} for j <= k+1, then t_k.
        for (j, pj) in p.iter().enumerate().take(k + 1) {
            bp.set(k + 1, j, -(&m[k + 1] * pj) / &g[k]);
        }
        bp.set(k + 1, k + 1, t[k - 1].clone());
        check_stage(&bp, p, &g, k + 2)?;
    }
    Ok((bp, AuxSequences { g, d, b, m, t }))
}

/// The leading `size x size` block, with first row scaled to `p / g_size`, has det 1.
fn check_stage(bp: &IntMat, p: &[BigInt], g: &[BigInt], size: usize) -> Result<()> {
    let rows: Vec<IntVec> = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| if i == 0 { &p[j] / &g[size - 1] } else { bp.get(i, j).clone() })
                .collect()
        })
        .collect();
    let det = IntMat::from_rows(rows)?.det()?;
    if det.is_one() {
        Ok(())
    } else {
        Err(Error::internal(format!("B' stage {size} has determinant {det}")))
    }
}

/// `B = B'^{-1}`, cross-checked against the closed form assembled from `aux`.
pub fn base_solution(bprime: &IntMat, aux: &AuxSequences) -> Result<IntMat> {
    let det = bprime.det()?;
    if !det.is_one() {
        return Err(Error::internal(format!("B' has determinant {det}")));
    }
    let base = bprime.inv_unimodular()?;
    let closed = base_closed_form(aux, bprime.nrows());
    if base != closed {
        return Err(Error::internal("inverse of B' disagrees with the closed form"));
    }
    let p = bprime.row(0);
    let mut e1 = vec![BigInt::zero(); p.len()];
    e1[0] = BigInt::one();
    if base.vec_mul(&p)? != e1 {
        return Err(Error::internal("p B != e_1"));
    }
    Ok(base)
}

fn prod(v: &[BigInt]) -> BigInt {
    v.iter().product()
}

/// Column 1: `m_r prod_{i=max(r-1,1)}^{n-2} t_i`; column 2: `(-b_2, b_1, 0, ...)`;
/// column `j >= 3`: `-m_r b_j prod_{i=max(r-1,1)}^{j-3} t_i` above the diagonal,
/// `d_{j-2}` on it.
fn base_closed_form(aux: &AuxSequences, n: usize) -> IntMat {
    let t = &aux.t;
    // t_i for i in [lo, hi] (1-based, inclusive); empty when lo > hi.
    let t_range = |lo: usize, hi: usize| if lo > hi { BigInt::one() } else { prod(&t[lo - 1..hi]) };
    let mut b = IntMat::zeros(n, n);
    for r in 1..=n {
        b.set(r - 1, 0, &aux.m[r - 1] * t_range((r - 1).max(1), n - 2));
    }
    b.set(0, 1, -&aux.b[1]);
    b.set(1, 1, aux.b[0].clone());
    for j in 3..=n {
        for r in 1..j {
            b.set(r - 1, j - 1, -(&aux.m[r - 1] * &aux.b[j - 1]) * t_range((r - 1).max(1), j - 3));
        }
        b.set(j - 1, j - 1, aux.d[j - 3].clone());
    }
    b
}

/// The columns `B S` must equal: zero, then `-p_k e_1 + p_1 e_k`.
fn scaffold_target(p: &[BigInt]) -> IntMat {
    let n = p.len();
    let mut t = IntMat::zeros(n, n);
    for k in 1..n {
        t.set(0, k, -&p[k]);
        t.set(k, k, p[0].clone());
    }
    t
}

/// The scaffold `S` with `B S` equal to the target, checked against its closed form.
pub fn build_scaffold(aux: &AuxSequences, p: &[BigInt], bprime: &IntMat, base: &IntMat) -> Result<IntMat> {
    let target = scaffold_target(p);
    let s = bprime.mul(&target)?;
    if base.mul(&s)? != target {
        return Err(Error::internal("scaffold identity B S = target fails"));
    }
    let n = p.len();
    let mut closed = IntMat::zeros(n, n);
    closed.set(1, 1, aux.g[1].clone());
    for r in 2..=n {
        let g_prev = if r == 2 { p[0].clone() } else { aux.g[r - 2].clone() };
        if r >= 3 {
            closed.set(r - 1, r - 1, &p[0] / &aux.d[r - 3]);
        }
        for k in r + 1..=n {
            closed.set(r - 1, k - 1, (&aux.m[r - 1] * &p[0] * &p[k - 1]) / &g_prev);
        }
    }
    if closed != s {
        return Err(Error::internal("scaffold disagrees with its closed form"));
    }
    Ok(s)
}

/// Bookkeeping from the column-one reduction loop.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStats {
    /// Columns (1-based) rewritten in part (I); the rest were already in bounds.
    pub adjusted_columns: Vec<usize>,
    /// Single adjustments performed in part (II).
    #[serde(with = "int_serde::one")]
    pub iterations: BigInt,
    /// Runs of identical adjustments applied at once.
    pub batches: usize,
}

fn in_bounds(col: &[BigInt], bound: &BigInt) -> bool {
    col.iter().all(|x| x.abs() <= *bound)
}

/// Reduce `base` (with `p base = e_1`, `p` nonnegative, `p_1 > 0`) to `A = base T`
/// with column `j >= 2` in `[-2^(j-2) P, 2^(j-2) P]^n` and column 1 in `[-P, P]^n`.
pub fn reduce_to_bounded(base: &IntMat, p: &[BigInt]) -> Result<(IntMat, IntMat, ReductionStats)> {
    let n = p.len();
    if n < 2 || base.nrows() != n || !base.is_square() {
        return Err(Error::invalid("dimension mismatch in reduce_to_bounded"));
    }
    if !p[0].is_positive() || p.iter().any(Signed::is_negative) {
        return Err(Error::invalid("reduce_to_bounded expects a nonnegative tuple with positive first entry"));
    }
    let mut e1 = vec![BigInt::zero(); n];
    e1[0] = BigInt::one();
    if base.vec_mul(p)? != e1 {
        return Err(Error::invalid("p base != e_1"));
    }
    let big_p = p.iter().max().cloned().unwrap_or_default();
    let bprime = base.inv_unimodular()?;
    let s = bprime.mul(&scaffold_target(p))?;
    if !s.is_upper_triangular() {
        return Err(Error::invalid("scaffold of this base is not upper triangular"));
    }
    let mut stats = ReductionStats { iterations: BigInt::zero(), ..Default::default() };

    // Part (I): L'_k = L_k + sum floor(s'_ik / s_kk) L'_i, with L' = L U.
    let mut u = IntMat::identity(n);
    let mut cols: Vec<IntVec> = (0..n).map(|j| base.col(j)).collect();
    if n >= 2 && !in_bounds(&cols[1], &big_p) {
        return Err(Error::invalid("second column of base exceeds the bound"));
    }
    for k in 2..n {
        let bound = &big_p << (k - 1);
        if in_bounds(&cols[k], &bound) {
            continue;
        }
        let skk = s.get(k, k);
        if !skk.is_positive() {
            return Err(Error::internal("nonpositive scaffold diagonal"));
        }
        // Solve U s' = s (rows/cols 1..k-1, 0-based) by back substitution.
        let mut sp = vec![BigInt::zero(); k];
        for i in (1..k).rev() {
            let mut v = s.get(i, k).clone();
            for (j, spj) in sp.iter().enumerate().take(k).skip(i + 1) {
                v -= u.get(i, j) * spj;
            }
            sp[i] = v;
        }
        let f: Vec<BigInt> = (0..k).map(|i| if i == 0 { BigInt::zero() } else { sp[i].div_floor(skk) }).collect();
        for m in 1..k {
            let mut coef = BigInt::zero();
            for (i, fi) in f.iter().enumerate().skip(1) {
                coef += fi * u.get(m, i);
            }
            u.set(m, k, coef);
        }
        let mut col = cols[k].clone();
        for i in 1..k {
            if f[i].is_zero() {
                continue;
            }
            for (x, y) in col.iter_mut().zip(&cols[i]) {
                *x += &f[i] * y;
            }
        }
        if !in_bounds(&col, &bound) {
            return Err(Error::internal(format!("part (I) column {} exceeds its bound", k + 1)));
        }
        cols[k] = col;
        stats.adjusted_columns.push(k + 1);
    }

    // Part (II): shrink column 1 with the coefficient exchanges.
    let mut c = cols[0].clone();
    let overflow = |c: &[BigInt]| -> (BigInt, BigInt) {
        let s1 = c.iter().filter(|x| **x > big_p).sum();
        let s2 = c.iter().filter(|x| **x < -&big_p).map(|x| -x).sum();
        (s1, s2)
    };
    let mut prev = overflow(&c);
    loop {
        let (s1, _) = &prev;
        let (i, sign) = if s1.is_positive() {
            (c.iter().position(|x| *x > big_p).expect("overflow"), 1)
        } else if let Some(i) = c.iter().position(|x| *x < -&big_p) {
            (i, -1)
        } else {
            break;
        };
        // c_i > P: take from a j with p_j > 0 and c_j < 0 (any p_j > 0 if p_i = 0);
        // the negative case mirrors it.
        let j = (0..n)
            .find(|&j| j != i && p[j].is_positive() && (p[i].is_zero() || (sign > 0 && c[j].is_negative()) || (sign < 0 && c[j].is_positive())))
            .ok_or_else(|| Error::internal("part (II) found no partner coordinate"))?;
        let excess = if sign > 0 { &c[i] - &big_p } else { -&c[i] - &big_p };
        let mut k = excess.div_ceil(&p[j]);
        if p[i].is_positive() {
            let room = if sign > 0 { -&c[j] } else { c[j].clone() };
            k = k.min(room.div_ceil(&p[i]));
        }
        let k = k.max(BigInt::one());
        if sign > 0 {
            c[i] -= &k * &p[j];
            c[j] += &k * &p[i];
        } else {
            c[i] += &k * &p[j];
            c[j] -= &k * &p[i];
        }
        stats.iterations += &k;
        stats.batches += 1;
        let next = overflow(&c);
        if next >= prev {
            return Err(Error::internal("part (II) overflow sums did not decrease"));
        }
        prev = next;
    }

    // Column 1 of A is c' = B (1, -d_2, ..., -d_n)^T, so (1, -d) = B' c'.
    let coeffs = bprime.mul_vec(&c)?;
    if !coeffs[0].is_one() {
        return Err(Error::internal("reduced first column left the affine lattice"));
    }
    let mut t = u;
    for (r, x) in coeffs.iter().enumerate().skip(1) {
        t.set(r, 0, x.clone());
    }
    let a = base.mul(&t)?;
    if a.col(0) != c || (1..n).any(|j| a.col(j) != cols[j]) {
        return Err(Error::internal("B T does not reproduce the reduced columns"));
    }
    Ok((t, a, stats))
}

/// Everything produced while completing one tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionTrace {
    #[serde(with = "int_serde::vec")]
    pub p: IntVec,
    /// `p M`, nonnegative with positive first entry.
    #[serde(with = "int_serde::vec")]
    pub normalized_p: IntVec,
    /// Signed permutation `M`.
    pub signed_perm: IntMat,
    /// Whether the last column was negated to restore determinant 1.
    pub flipped_last_column: bool,
    pub bprime: IntMat,
    pub base: IntMat,
    pub scaffold: IntMat,
    pub reducer: IntMat,
    /// `A = M (base reducer) E`, which satisfies `p A = e_1`.
    pub result: IntMat,
    #[serde(with = "int_serde::one")]
    pub bound: BigInt,
    pub aux: AuxSequences,
    pub stats: ReductionStats,
}

/// `2^(max(n-2, 0)) max|p_k|`.
pub fn completion_bound(p: &[BigInt]) -> BigInt {
    let big_p = p.iter().map(Signed::abs).max().unwrap_or_default();
    big_p << p.len().saturating_sub(2)
}

fn validate(p: &[BigInt]) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::invalid("completion needs n >= 2"));
    }
    if !gcd_all(p).is_one() {
        return Err(Error::invalid(format!("tuple {p:?} is not coprime")));
    }
    Ok(())
}

/// Full completion with every intermediate matrix (`n >= 3`).
pub fn complete_with_trace(p: &[BigInt]) -> Result<CompletionTrace> {
    validate(p)?;
    let n = p.len();
    if n < 3 {
        return Err(Error::invalid("traced completion needs n >= 3"));
    }
    // Signed permutation: move the first nonzero entry to slot 1, then flip signs.
    let lead = p.iter().position(|x| !x.is_zero()).expect("coprime tuple is nonzero");
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(0, lead);
    let mut m = IntMat::zeros(n, n);
    let mut normalized = vec![BigInt::zero(); n];
    for (j, &i) in perm.iter().enumerate() {
        // column j of M picks original coordinate i
        let s = if p[i].is_negative() { -BigInt::one() } else { BigInt::one() };
        normalized[j] = &p[i] * &s;
        m.set(i, j, s);
    }
    let flipped = m.det()? != BigInt::one();

    let (bprime, aux) = build_bprime(&normalized)?;
    let base = base_solution(&bprime, &aux)?;
    let scaffold = build_scaffold(&aux, &normalized, &bprime, &base)?;
    let (reducer, a_norm, stats) = reduce_to_bounded(&base, &normalized)?;
    let mut result = m.mul(&a_norm)?;
    if flipped {
        result.neg_col(n - 1);
    }
    let trace = CompletionTrace {
        p: p.to_vec(),
        normalized_p: normalized,
        signed_perm: m,
        flipped_last_column: flipped,
        bprime,
        base,
        scaffold,
        reducer,
        result,
        bound: completion_bound(p),
        aux,
        stats,
    };
    check_contract(p, &trace.result)?;
    Ok(trace)
}

/// `det A = 1`, `p A = e_1`, and the entry bound.
pub fn check_contract(p: &[BigInt], a: &IntMat) -> Result<()> {
    let n = p.len();
    let det = a.det()?;
    if !det.is_one() {
        return Err(Error::NotUnimodular(det));
    }
    let mut e1 = vec![BigInt::zero(); n];
    e1[0] = BigInt::one();
    if a.vec_mul(p)? != e1 {
        return Err(Error::internal("p A != e_1"));
    }
    if a.max_abs() > completion_bound(p) {
        return Err(Error::internal("completion exceeds the entry bound"));
    }
    Ok(())
}

/// `A` in `SL_n(Z)` with `p A = e_1` and bounded entries.
pub fn unimodular_complete(p: &[BigInt]) -> Result<IntMat> {
    validate(p)?;
    if p.len() == 2 {
        let a = bezout_matrix_2d(&p[0], &p[1])?;
        check_contract(p, &a)?;
        return Ok(a);
    }
    Ok(complete_with_trace(p)?.result)
}
