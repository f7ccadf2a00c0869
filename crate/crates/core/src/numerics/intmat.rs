use super::Rat;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Integer vector; p-tuples and matrix columns.
pub type IntVec = Vec<BigInt>;

/// Dense square-or-rectangular matrix of arbitrary-precision integers, row major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMat {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(IntMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Panics on ragged input; for literals.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntMat::from_rows(rows).expect("rectangular literal")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_cols(cols: &[IntVec]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = IntMat::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            if col.len() != r {
                return Err(Error::invalid("ragged matrix columns"));
            }
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        if r == 0 || c == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> IntVec {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> IntVec {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn set_col(&mut self, j: usize, col: &[BigInt]) {
        for (i, x) in col.iter().enumerate() {
            self.set(i, j, x.clone());
        }
    }

    pub fn to_rows(&self) -> Vec<IntVec> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> IntMat {
        let mut t = IntMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMat) -> Result<IntMat> {
        if self.cols != rhs.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = IntMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * out.cols + j;
                    out.data[idx] += a * rhs.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// `M x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[BigInt]) -> Result<IntVec> {
        if x.len() != self.cols {
            return Err(Error::invalid("vector length does not match matrix columns"));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * &x[j]).sum())
            .collect())
    }

    /// `x M` for a row vector `x`.
    pub fn vec_mul(&self, x: &[BigInt]) -> Result<IntVec> {
        if x.len() != self.rows {
            return Err(Error::invalid("vector length does not match matrix rows"));
        }
        Ok((0..self.cols)
            .map(|j| (0..self.rows).map(|i| &x[i] * self.get(i, j)).sum())
            .collect())
    }

    /// `M x` over the rationals.
    pub fn mul_rat_vec(&self, x: &[Rat]) -> Result<Vec<Rat>> {
        if x.len() != self.cols {
            return Err(Error::invalid("vector length does not match matrix columns"));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| Rat::int(self.get(i, j).clone()) * &x[j]).sum())
            .collect())
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(Signed::abs).max().unwrap_or_default()
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    pub fn neg_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let idx = i * self.cols + j;
            self.data[idx] = -&self.data[idx];
        }
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::invalid("determinant of a non-square matrix"));
        }
        let n = self.rows;
        let mut m: Vec<Vec<BigInt>> = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        Ok(sign * &m[n - 1][n - 1])
    }

    /// Integer inverse of a matrix with determinant `±1`.
    pub fn inv_unimodular(&self) -> Result<IntMat> {
        let det = self.det()?;
        if det.abs() != BigInt::one() {
            return Err(Error::NotUnimodular(det));
        }
        // Integer Gauss-Jordan: the row operations stay within GL_n(Z)
        // because pivots are produced by gcd steps.
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = IntMat::identity(n).to_rows();
        for k in 0..n {
            // Euclid on column k below the diagonal until one entry remains.
            loop {
                let nz: Vec<usize> = (k..n).filter(|&i| !a[i][k].is_zero()).collect();
                if nz.len() <= 1 {
                    if let Some(&i) = nz.first() {
                        a.swap(k, i);
                        inv.swap(k, i);
                    }
                    break;
                }
                let piv = *nz.iter().min_by_key(|&&i| a[i][k].abs()).expect("nonempty");
                for &i in &nz {
                    if i != piv {
                        let q = a[i][k].div_floor(&a[piv][k]);
                        row_axpy(&mut a, i, piv, &q);
                        row_axpy(&mut inv, i, piv, &q);
                    }
                }
            }
            if a[k][k].is_negative() {
                for j in 0..n {
                    a[k][j] = -&a[k][j];
                    inv[k][j] = -&inv[k][j];
                }
            }
            if !a[k][k].is_one() {
                return Err(Error::internal("unimodular pivot is not 1"));
            }
            for i in 0..n {
                if i != k && !a[i][k].is_zero() {
                    let q = a[i][k].clone();
                    row_axpy(&mut a, i, k, &q);
                    row_axpy(&mut inv, i, k, &q);
                }
            }
        }
        IntMat::from_rows(inv)
    }
}

/// `row_i -= q * row_j`.
fn row_axpy(m: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    let src = m[j].clone();
    for (x, y) in m[i].iter_mut().zip(src.iter()) {
        *x -= q * y;
    }
}

impl fmt::Display for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serde helpers storing integers as decimal strings (numbers accepted on input).
pub mod int_serde {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum IntRepr {
        Text(String),
        Num(i64),
    }

    impl IntRepr {
        fn into_big<E: serde::de::Error>(self) -> std::result::Result<BigInt, E> {
            match self {
                IntRepr::Num(v) => Ok(BigInt::from(v)),
                IntRepr::Text(s) => BigInt::from_str(s.trim()).map_err(|_| E::custom(format!("not an integer: {s:?}"))),
            }
        }
    }

    pub mod one {
        use super::*;

        pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_str(v)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
            IntRepr::deserialize(d)?.into_big()
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(ToString::to_string))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigInt>, D::Error> {
            Vec::<IntRepr>::deserialize(d)?.into_iter().map(IntRepr::into_big).collect()
        }
    }

    pub mod vec_vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<BigInt>>, D::Error> {
            Vec::<Vec<IntRepr>>::deserialize(d)?
                .into_iter()
                .map(|r| r.into_iter().map(IntRepr::into_big).collect())
                .collect()
        }
    }
}

impl Serialize for IntMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        int_serde::vec_vec::serialize(&self.to_rows(), s)
    }
}

impl<'de> Deserialize<'de> for IntMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = int_serde::vec_vec::deserialize(d)?;
        IntMat::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Cofactor expansion along the first row; an independent determinant oracle.
    fn det_cofactor(m: &[Vec<BigInt>]) -> BigInt {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let term = &m[0][j] * det_cofactor(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn det_examples() {
        assert_eq!(IntMat::identity(3).det().unwrap(), BigInt::one());
        assert_eq!(IntMat::from_i64(&[&[2, 1], &[1, 1]]).det().unwrap(), BigInt::one());
        assert_eq!(IntMat::from_i64(&[&[2, 3, 5], &[1, 2, 0], &[0, 0, 1]]).det().unwrap(), BigInt::one());
        assert_eq!(IntMat::from_i64(&[&[0, 1], &[1, 0]]).det().unwrap(), BigInt::from(-1));
        assert_eq!(IntMat::from_i64(&[&[1, 2], &[2, 4]]).det().unwrap(), BigInt::zero());
    }

    #[test]
    fn inverse_examples() {
        let m = IntMat::from_i64(&[&[2, 3, 5], &[1, 2, 0], &[0, 0, 1]]);
        assert_eq!(m.inv_unimodular().unwrap(), IntMat::from_i64(&[&[2, -3, -10], &[-1, 2, 5], &[0, 0, 1]]));
        let c = IntMat::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(c.inv_unimodular().unwrap(), IntMat::from_i64(&[&[1, -1], &[-1, 2]]));
        assert_eq!(IntMat::identity(4).inv_unimodular().unwrap(), IntMat::identity(4));
        let bad = IntMat::from_i64(&[&[2, 0], &[0, 1]]);
        assert_eq!(bad.inv_unimodular(), Err(Error::NotUnimodular(BigInt::from(2))));
    }

    #[test]
    fn json_rows_are_strings() {
        let m = IntMat::from_i64(&[&[1, -2], &[-1, 3]]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1","-2"],["-1","3"]]"#);
        let back: IntMat = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let nums: IntMat = serde_json::from_str("[[1,-2],[-1,3]]").unwrap();
        assert_eq!(nums, m);
        assert!(serde_json::from_str::<IntMat>("[[1],[1,2]]").is_err());
    }

    fn elementary_product(n: usize, ops: &[(usize, usize, i64)]) -> IntMat {
        let mut m = IntMat::identity(n);
        for &(i, j, k) in ops {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            let mut e = IntMat::identity(n);
            e.set(i, j, BigInt::from(k));
            m = m.mul(&e).unwrap();
        }
        m
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(n in 1usize..6, entries in proptest::collection::vec(-20i64..20, 25)) {
            let rows: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from(entries[i * 5 + j])).collect()).collect();
            let m = IntMat::from_rows(rows.clone()).unwrap();
            prop_assert_eq!(m.det().unwrap(), det_cofactor(&rows));
        }

        #[test]
        fn inverse_round_trip(n in 2usize..7, ops in proptest::collection::vec((0usize..7, 0usize..7, -5i64..6), 1..20)) {
            let m = elementary_product(n, &ops);
            prop_assert_eq!(m.det().unwrap(), BigInt::one());
            let inv = m.inv_unimodular().unwrap();
            prop_assert_eq!(m.mul(&inv).unwrap(), IntMat::identity(n));
            prop_assert_eq!(inv.inv_unimodular().unwrap(), m);
        }
    }
}
