//! Sparse vectors and matrices with exact entries.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Coefficient types usable in sparse vectors.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Coeff for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Coeff for i64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &Self) -> Self {
        self.checked_add(*o).expect("i64 coefficient overflow")
    }
    fn mul(&self, o: &Self) -> Self {
        self.checked_mul(*o).expect("i64 coefficient overflow")
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// A sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SparseVec<T> {
    entries: Vec<(usize, T)>,
}

impl<T: Coeff> SparseVec<T> {
    pub fn new() -> Self {
        SparseVec {
            entries: Vec::new(),
        }
    }

    /// Builds from arbitrary (index, value) pairs; duplicates are summed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, T)>) -> Self {
        let mut map: BTreeMap<usize, T> = BTreeMap::new();
        for (i, v) in pairs {
            match map.get_mut(&i) {
                Some(e) => *e = e.add(&v),
                None => {
                    map.insert(i, v);
                }
            }
        }
        SparseVec::from_map(map)
    }

    pub fn from_map(map: BTreeMap<usize, T>) -> Self {
        SparseVec {
            entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    /// Caller guarantees sorted unique indices; zeros are dropped.
    pub fn from_sorted(entries: Vec<(usize, T)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        SparseVec {
            entries: entries.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn unit(i: usize, v: T) -> Self {
        SparseVec::from_sorted(vec![(i, v)])
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, T)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, T)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> Option<&T> {
        self.entries
            .binary_search_by_key(&i, |e| e.0)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn leading(&self) -> Option<&(usize, T)> {
        self.entries.first()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|e| e.0)
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec::from_sorted(self.entries.iter().map(|(i, v)| (*i, v.mul(c))).collect())
    }

    pub fn neg(&self) -> Self {
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v.neg())).collect(),
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &T, other: &Self) -> Self {
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, y.mul(c)));
                        b.next();
                    } else {
                        let s = x.add(&y.mul(c));
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, y.mul(c)));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(&T::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(&T::one().neg(), other)
    }

    pub fn dot(&self, other: &Self) -> T {
        let mut acc = T::zero();
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() && b < other.entries.len() {
            let (i, x) = &self.entries[a];
            let (j, y) = &other.entries[b];
            if i < j {
                a += 1;
            } else if j < i {
                b += 1;
            } else {
                acc = acc.add(&x.mul(y));
                a += 1;
                b += 1;
            }
        }
        acc
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> SparseVec<U> {
        SparseVec::from_sorted(self.entries.iter().map(|(i, v)| (*i, f(v))).collect())
    }

    pub fn to_dense(&self, len: usize) -> Vec<T> {
        let mut d = vec![T::zero(); len];
        for (i, v) in &self.entries {
            d[*i] = v.clone();
        }
        d
    }
}

/// A sparse exact matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: Vec<SparseVec<Scalar>>,
}

impl ExactMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols: vec![SparseVec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        ExactMatrix {
            rows: n,
            cols: (0..n).map(|i| SparseVec::unit(i, Scalar::one())).collect(),
        }
    }

    pub fn from_columns(rows: usize, cols: Vec<SparseVec<Scalar>>) -> Result<Self> {
        for (j, c) in cols.iter().enumerate() {
            if let Some(m) = c.max_index() {
                if m >= rows {
                    return Err(Error::invalid(format!(
                        "column {j} has entry in row {m}, but the matrix has {rows} rows"
                    )));
                }
            }
        }
        Ok(ExactMatrix { rows, cols })
    }

    /// From integer triplets (row, col, value); duplicates are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self> {
        let mut per_col: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::invalid(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            per_col[c].push((r, v));
        }
        Ok(ExactMatrix {
            rows,
            cols: per_col.into_iter().map(SparseVec::from_pairs).collect(),
        })
    }

    pub fn from_dense_i64(rows: &[Vec<i64>]) -> Self {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let trip = rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .map(move |(j, v)| (i, j, Scalar::from_int(*v)))
        });
        ExactMatrix::from_triplets(nr, nc, trip).expect("dense rows have equal length")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &SparseVec<Scalar> {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec<Scalar>] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.cols[j].get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.nnz()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    pub fn is_integer(&self) -> bool {
        self.cols
            .iter()
            .all(|c| c.iter().all(|(_, v)| v.is_integer()))
    }

    /// Entries in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, v)| (*i, j, v)))
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut per_row: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.rows];
        for (i, j, v) in self.triplets() {
            per_row[i].push((j, v.clone()));
        }
        ExactMatrix {
            rows: self.cols.len(),
            cols: per_row.into_iter().map(SparseVec::from_sorted).collect(),
        }
    }

    /// `self * v`.
    pub fn apply(&self, v: &SparseVec<Scalar>) -> SparseVec<Scalar> {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (j, c) in v.iter() {
            for (i, a) in self.cols[*j].iter() {
                let e = acc.entry(*i).or_insert_with(Scalar::zero);
                *e = &*e + &(a * c);
            }
        }
        SparseVec::from_map(acc)
    }

    pub fn mul(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols() != other.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        Ok(ExactMatrix {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        })
    }

    pub fn add(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.combine(other, &Scalar::one())
    }

    pub fn sub(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        self.combine(other, &Scalar::from_int(-1))
    }

    fn combine(&self, other: &ExactMatrix, c: &Scalar) -> Result<ExactMatrix> {
        if self.rows != other.rows || self.cols() != other.cols() {
            return Err(Error::invalid("matrix shapes differ"));
        }
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .zip(&other.cols)
                .map(|(a, b)| a.add_scaled(c, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols.iter().map(|v| v.scale(c)).collect(),
        }
    }

    /// Restricts to the listed columns, in the listed order.
    pub fn select_columns(&self, idx: &[usize]) -> ExactMatrix {
        ExactMatrix {
            rows: self.rows,
            cols: idx.iter().map(|&j| self.cols[j].clone()).collect(),
        }
    }

    pub(crate) fn int_rows(&self) -> Result<Vec<SparseVec<BigInt>>> {
        let mut rows: Vec<Vec<(usize, BigInt)>> = vec![Vec::new(); self.rows];
        for (i, j, v) in self.triplets() {
            let z = v
                .to_bigint()
                .ok_or_else(|| Error::invalid(format!("non-integer entry {v} at ({i}, {j})")))?;
            rows[i].push((j, z));
        }
        Ok(rows.into_iter().map(SparseVec::from_sorted).collect())
    }

    pub(crate) fn int_dense(&self) -> Result<Vec<Vec<BigInt>>> {
        let mut d = vec![vec![<BigInt as Zero>::zero(); self.cols()]; self.rows];
        for (i, j, v) in self.triplets() {
            d[i][j] = v
                .to_bigint()
                .ok_or_else(|| Error::invalid(format!("non-integer entry {v} at ({i}, {j})")))?;
        }
        Ok(d)
    }

    pub(crate) fn from_int_dense(d: &[Vec<BigInt>], cols: usize) -> ExactMatrix {
        let trip = d.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, v)| !Zero::is_zero(*v))
                .map(move |(j, v)| (i, j, Scalar::from_bigint(v.clone())))
        });
        ExactMatrix::from_triplets(d.len(), cols, trip).expect("in range")
    }
}

/// Serialized form: sparse entries as (row, col, numerator, denominator).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, String, String)>,
}

impl From<&ExactMatrix> for MatrixJson {
    fn from(m: &ExactMatrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .triplets()
                .map(|(i, j, v)| (i, j, v.numer().to_string(), v.denom().to_string()))
                .collect(),
        }
    }
}

impl TryFrom<&MatrixJson> for ExactMatrix {
    type Error = Error;
    fn try_from(m: &MatrixJson) -> Result<Self> {
        let mut trip = Vec::with_capacity(m.entries.len());
        for (i, j, n, d) in &m.entries {
            let n: BigInt = n
                .parse()
                .map_err(|_| Error::invalid(format!("bad numerator {n:?}")))?;
            let d: BigInt = d
                .parse()
                .map_err(|_| Error::invalid(format!("bad denominator {d:?}")))?;
            if Zero::is_zero(&d) {
                return Err(Error::invalid("zero denominator"));
            }
            let v = Scalar::from_big(num_rational::BigRational::new(n, d));
            trip.push((*i, *j, v));
        }
        ExactMatrix::from_triplets(m.rows, m.cols, trip)
    }
}
