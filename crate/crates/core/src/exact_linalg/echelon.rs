//! Incremental echelon forms over Q and Z.
//!
//! Both structures accept vectors one at a time. The field version keeps rows
//! with a leading 1; the lattice version keeps rows with a positive leading
//! entry and merges rows sharing a pivot through an extended-gcd step, so the
//! rows always form a basis of the integer span of everything inserted.
//! Optional tracking records each row as a combination of the inserted
//! vectors, which is what exact solving needs.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::scalar::{ext_gcd, Scalar};
use super::sparse::SparseVec;

type QVec = SparseVec<Scalar>;
type ZVec = SparseVec<BigInt>;

/// Row echelon form over the rationals.
#[derive(Clone, Debug, Default)]
pub struct FieldEchelon {
    rows: BTreeMap<usize, QVec>,
    combos: Option<BTreeMap<usize, QVec>>,
    inserted: usize,
}

impl FieldEchelon {
    pub fn new() -> Self {
        FieldEchelon::default()
    }

    pub fn with_tracking() -> Self {
        FieldEchelon {
            combos: Some(BTreeMap::new()),
            ..Default::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// Reduces `v` against the stored rows. Returns the remainder and, when
    /// tracking, the combination of inserted vectors that was subtracted.
    pub fn reduce(&self, v: &QVec) -> (QVec, QVec) {
        let mut v = v.clone();
        let mut used = QVec::new();
        let mut cursor = 0usize;
        loop {
            let next = v.iter().find(|(i, _)| *i >= cursor).cloned();
            let Some((p, c)) = next else { break };
            if let Some(row) = self.rows.get(&p) {
                v = v.add_scaled(&-&c, row);
                if let Some(cb) = &self.combos {
                    used = used.add_scaled(&c, &cb[&p]);
                }
            }
            cursor = p + 1;
        }
        (v, used)
    }

    /// Inserts `v`; returns true when the rank grew.
    pub fn insert(&mut self, v: &QVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let (r, used) = self.reduce(v);
        let Some((p, lead)) = r.leading().cloned() else {
            return false;
        };
        let inv = lead.recip();
        self.rows.insert(p, r.scale(&inv));
        if let Some(cb) = &mut self.combos {
            let own = QVec::unit(idx, Scalar::one()).add_scaled(&Scalar::from_int(-1), &used);
            cb.insert(p, own.scale(&inv));
        }
        true
    }

    pub fn contains(&self, v: &QVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Coefficients `x` over the inserted vectors with `Σ x_i g_i = v`.
    pub fn express(&self, v: &QVec) -> Option<QVec> {
        assert!(self.combos.is_some(), "express requires tracking");
        let (r, used) = self.reduce(v);
        r.is_zero().then_some(used)
    }
}

/// Row echelon form over the integers (a lattice basis).
#[derive(Clone, Debug, Default)]
pub struct IntEchelon {
    rows: BTreeMap<usize, ZVec>,
    combos: Option<BTreeMap<usize, ZVec>>,
    inserted: usize,
}

impl IntEchelon {
    pub fn new() -> Self {
        IntEchelon::default()
    }

    pub fn with_tracking() -> Self {
        IntEchelon {
            combos: Some(BTreeMap::new()),
            ..Default::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v` into the lattice; returns true when the rank grew.
    pub fn insert(&mut self, v: &ZVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let mut v = v.clone();
        let mut vc = self.combos.as_ref().map(|_| ZVec::unit(idx, BigInt::one()));
        loop {
            let Some((p, b)) = v.leading().cloned() else {
                return false;
            };
            let Some(row) = self.rows.get(&p) else {
                if b.is_negative() {
                    v = v.neg();
                    vc = vc.map(|c| c.neg());
                }
                self.rows.insert(p, v);
                if let (Some(cb), Some(c)) = (&mut self.combos, vc) {
                    cb.insert(p, c);
                }
                return true;
            };
            let a = row.get(p).expect("pivot entry").clone();
            if b.is_multiple_of(&a) {
                let q = -(&b / &a);
                v = v.add_scaled(&q, row);
                if let (Some(cb), Some(c)) = (&self.combos, vc.as_mut()) {
                    *c = c.add_scaled(&q, &cb[&p]);
                }
                continue;
            }
            // unimodular 2x2 step: new pivot row gets gcd(a, b)
            let (g, x, y) = ext_gcd(&a, &b);
            let (ag, bg) = (&a / &g, &b / &g);
            let new_row = row.scale(&x).add_scaled(&y, &v);
            let rest = v.scale(&ag).add_scaled(&-&bg, row);
            if let (Some(cb), Some(c)) = (&mut self.combos, vc.as_mut()) {
                let rc = cb[&p].clone();
                let new_c = rc.scale(&x).add_scaled(&y, c);
                *c = c.scale(&ag).add_scaled(&-&bg, &rc);
                cb.insert(p, new_c);
            }
            self.rows.insert(p, new_row);
            v = rest;
        }
    }

    /// Greedy reduction of `v`; returns the subtracted combination of
    /// inserted vectors when `v` lies in the lattice.
    fn reduce_exact(&self, v: &ZVec) -> Option<ZVec> {
        let mut v = v.clone();
        let mut used = ZVec::new();
        while let Some((p, b)) = v.leading().cloned() {
            let row = self.rows.get(&p)?;
            let a = row.get(p).expect("pivot entry");
            if !b.is_multiple_of(a) {
                return None;
            }
            let q = &b / a;
            v = v.add_scaled(&-&q, row);
            if let Some(cb) = &self.combos {
                used = used.add_scaled(&q, &cb[&p]);
            }
        }
        Some(used)
    }

    pub fn contains(&self, v: &ZVec) -> bool {
        self.reduce_exact(v).is_some()
    }

    /// Integer coefficients over the inserted vectors with `Σ x_i g_i = v`.
    pub fn express(&self, v: &ZVec) -> Option<ZVec> {
        assert!(self.combos.is_some(), "express requires tracking");
        self.reduce_exact(v)
    }

    /// Freezes into a reduced Hermite basis.
    pub fn into_basis(self) -> LatticeBasis {
        let pivots: Vec<usize> = self.rows.keys().copied().collect();
        let mut rows: Vec<ZVec> = self.rows.into_values().collect();
        // reduce entries above each pivot into [0, pivot)
        for j in 0..rows.len() {
            let p = pivots[j];
            let a = rows[j].get(p).expect("pivot").clone();
            let (head, tail) = rows.split_at_mut(j);
            let pr = &tail[0];
            for r in head.iter_mut() {
                if let Some(e) = r.get(p) {
                    let q = e.div_floor(&a);
                    if !q.is_zero() {
                        *r = r.add_scaled(&-q, pr);
                    }
                }
            }
        }
        LatticeBasis::from_rows(pivots, rows)
    }
}

/// A lattice basis in Hermite shape, with coordinate lookup.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LatticeBasis {
    pivots: Vec<usize>,
    rows: Vec<ZVec>,
    index: HashMap<usize, usize>,
}

impl LatticeBasis {
    fn from_rows(pivots: Vec<usize>, rows: Vec<ZVec>) -> Self {
        let index = pivots.iter().enumerate().map(|(k, p)| (*p, k)).collect();
        LatticeBasis {
            pivots,
            rows,
            index,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[ZVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in this basis, or `None` when `v` is outside the lattice.
    pub fn coordinates(&self, v: &ZVec) -> Option<ZVec> {
        let mut v = v.clone();
        let mut coords = Vec::new();
        while let Some((p, b)) = v.leading().cloned() {
            let k = *self.index.get(&p)?;
            let row = &self.rows[k];
            let a = row.get(p).expect("pivot");
            if !b.is_multiple_of(a) {
                return None;
            }
            let q = &b / a;
            v = v.add_scaled(&-&q, row);
            coords.push((k, q));
        }
        Some(ZVec::from_sorted(coords))
    }
}

/// A basis of a rational subspace in reduced echelon shape, with coordinates.
#[derive(Clone, Debug, Default)]
pub struct SubspaceBasis {
    pivots: Vec<usize>,
    rows: Vec<QVec>,
    index: HashMap<usize, usize>,
}

impl SubspaceBasis {
    pub fn from_echelon(e: FieldEchelon) -> Self {
        let pivots: Vec<usize> = e.rows.keys().copied().collect();
        let mut rows: Vec<QVec> = e.rows.into_values().collect();
        for j in 0..rows.len() {
            let p = pivots[j];
            let (head, tail) = rows.split_at_mut(j);
            let pr = &tail[0];
            for r in head.iter_mut() {
                if let Some(c) = r.get(p).cloned() {
                    *r = r.add_scaled(&-&c, pr);
                }
            }
        }
        let index = pivots.iter().enumerate().map(|(k, p)| (*p, k)).collect();
        SubspaceBasis {
            pivots,
            rows,
            index,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[QVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn coordinates(&self, v: &QVec) -> Option<QVec> {
        let mut v = v.clone();
        let mut coords = Vec::new();
        while let Some((p, c)) = v.leading().cloned() {
            let k = *self.index.get(&p)?;
            v = v.add_scaled(&-&c, &self.rows[k]);
            coords.push((k, c));
        }
        coords.sort_by_key(|e| e.0);
        Some(QVec::from_sorted(coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: &[i64]) -> ZVec {
        ZVec::from_pairs(p.iter().enumerate().map(|(i, v)| (i, BigInt::from(*v))))
    }

    #[test]
    fn lattice_merges_pivots_by_gcd() {
        let mut e = IntEchelon::with_tracking();
        e.insert(&z(&[4, 1]));
        e.insert(&z(&[6, 0]));
        // lattice spanned by (4,1),(6,0) has determinant -6 and contains (2, ·)
        let b = e.clone().into_basis();
        assert_eq!(b.rank(), 2);
        let lead: Vec<BigInt> = b
            .rows()
            .iter()
            .map(|r| r.leading().unwrap().1.clone())
            .collect();
        assert_eq!(lead[0], BigInt::from(2));
        assert!(e.contains(&z(&[2, -1])));
        assert!(!e.contains(&z(&[1, 0])));
        let x = e.express(&z(&[2, -1])).unwrap();
        // check Σ x_i g_i
        let g = [z(&[4, 1]), z(&[6, 0])];
        let mut acc = ZVec::new();
        for (i, c) in x.iter() {
            acc = acc.add_scaled(c, &g[*i]);
        }
        assert_eq!(acc, z(&[2, -1]));
    }

    #[test]
    fn subspace_coordinates() {
        let q = |p: &[i64]| {
            QVec::from_pairs(p.iter().enumerate().map(|(i, v)| (i, Scalar::from_int(*v))))
        };
        let mut e = FieldEchelon::with_tracking();
        assert!(e.insert(&q(&[1, 1, 0])));
        assert!(e.insert(&q(&[0, 2, 2])));
        assert!(!e.insert(&q(&[1, 3, 2])));
        let x = e.express(&q(&[2, 0, -2])).unwrap();
        assert_eq!(x.get(0), Some(&Scalar::from_int(2)));
        assert_eq!(x.get(1), Some(&Scalar::from_int(-1)));
        let b = SubspaceBasis::from_echelon(e);
        assert!(b.coordinates(&q(&[0, 0, 1])).is_none());
        assert!(b.coordinates(&q(&[1, -1, -2])).is_some());
    }
}
