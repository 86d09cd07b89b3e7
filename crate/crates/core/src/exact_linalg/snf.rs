//! Smith normal form.
//!
//! `snf` works densely and records both transforms; it is meant for small
//! matrices and for tests. `invariant_factors` works on sparse rows without
//! transforms and is what homology over Z uses.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::scalar::div_mod_floor;
use super::sparse::{ExactMatrix, SparseVec};
use crate::error::Result;

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: ExactMatrix,
    pub d: ExactMatrix,
    pub v: ExactMatrix,
    /// Nonzero diagonal entries of `D`, each dividing the next.
    pub invariant_factors: Vec<BigInt>,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }
}

/// Quotient rounded to nearest, so remainders are at most half the divisor.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = div_mod_floor(a, b);
    let r2: BigInt = &r * 2;
    // r has the sign of b; stepping q up replaces r by r - b
    if r2.abs() > b.abs() {
        q + 1
    } else {
        q
    }
}

struct Dense {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    m: usize,
    n: usize,
}

impl Dense {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for r in self.a.iter_mut() {
            r.swap(i, j);
        }
        for r in self.v.iter_mut() {
            r.swap(i, j);
        }
    }

    /// row_i += c * row_j
    fn add_row(&mut self, i: usize, j: usize, c: &BigInt) {
        for k in 0..self.n {
            let t = &self.a[j][k] * c;
            self.a[i][k] += t;
        }
        for k in 0..self.m {
            let t = &self.u[j][k] * c;
            self.u[i][k] += t;
        }
    }

    /// col_i += c * col_j
    fn add_col(&mut self, i: usize, j: usize, c: &BigInt) {
        for r in self.a.iter_mut() {
            let t = &r[j] * c;
            r[i] += t;
        }
        for r in self.v.iter_mut() {
            let t = &r[j] * c;
            r[i] += t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -&*x;
        }
    }

    fn min_entry(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m {
            for j in t..self.n {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        return best;
                    }
                }
            }
        }
        best
    }
}

/// Smith normal form with transforms. Rejects non-integer input.
pub fn snf(a: &ExactMatrix) -> Result<SmithDecomposition> {
    let (m, n) = (a.rows(), a.cols());
    let ident = |k: usize| -> Vec<Vec<BigInt>> {
        (0..k)
            .map(|i| (0..k).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect()
    };
    let mut s = Dense {
        a: a.int_dense()?,
        u: ident(m),
        v: ident(n),
        m,
        n,
    };
    let mut factors = Vec::new();
    for t in 0..m.min(n) {
        let Some((pi, pj)) = s.min_entry(t) else {
            break;
        };
        s.swap_rows(t, pi);
        s.swap_cols(t, pj);
        loop {
            let p = s.a[t][t].clone();
            let mut clean = true;
            for i in t + 1..m {
                if !s.a[i][t].is_zero() {
                    let q = round_div(&s.a[i][t], &p);
                    s.add_row(i, t, &-q);
                    clean &= s.a[i][t].is_zero();
                }
            }
            for j in t + 1..n {
                if !s.a[t][j].is_zero() {
                    let q = round_div(&s.a[t][j], &p);
                    s.add_col(j, t, &-q);
                    clean &= s.a[t][j].is_zero();
                }
            }
            if !clean {
                // a smaller remainder sits in row t or column t
                let mut best = (t, t);
                for i in t + 1..m {
                    if !s.a[i][t].is_zero() && s.a[i][t].abs() < s.a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !s.a[t][j].is_zero() && s.a[t][j].abs() < s.a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                s.swap_rows(t, best.0);
                s.swap_cols(t, best.1);
                continue;
            }
            // enforce divisibility of the remaining block
            let bad = (t + 1..m)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !s.a[i][j].is_multiple_of(&p));
            match bad {
                Some((i, _)) => s.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        if s.a[t][t].is_negative() {
            s.negate_row(t);
        }
        factors.push(s.a[t][t].clone());
    }
    Ok(SmithDecomposition {
        u: ExactMatrix::from_int_dense(&s.u, m),
        d: ExactMatrix::from_int_dense(&s.a, n),
        v: ExactMatrix::from_int_dense(&s.v, n),
        invariant_factors: factors,
    })
}

/// Sparse elimination state: rows plus a column index.
struct SparseInt {
    rows: Vec<SparseVec<BigInt>>,
    col_rows: Vec<BTreeSet<usize>>,
}

impl SparseInt {
    fn new(rows: Vec<SparseVec<BigInt>>, ncols: usize) -> Self {
        let mut col_rows = vec![BTreeSet::new(); ncols];
        for (i, r) in rows.iter().enumerate() {
            for (j, _) in r.iter() {
                col_rows[*j].insert(i);
            }
        }
        SparseInt { rows, col_rows }
    }

    fn entry(&self, i: usize, j: usize) -> Option<&BigInt> {
        self.rows[i].get(j)
    }

    fn replace_row(&mut self, i: usize, new: SparseVec<BigInt>) {
        for (j, _) in self.rows[i].iter() {
            self.col_rows[*j].remove(&i);
        }
        for (j, _) in new.iter() {
            self.col_rows[*j].insert(i);
        }
        self.rows[i] = new;
    }

    /// Pivot: unit entries first, then smallest magnitude, ties broken by
    /// the Markowitz fill estimate.
    fn choose_pivot(&self) -> Option<(usize, usize)> {
        let mut best: Option<(bool, BigInt, usize, usize, usize)> = None;
        for (j, rs) in self.col_rows.iter().enumerate() {
            if rs.is_empty() {
                continue;
            }
            let cn = rs.len() - 1;
            for &i in rs {
                let v = self.entry(i, j).expect("indexed").abs();
                let unit = v.is_one();
                let cost = cn * (self.rows[i].nnz() - 1);
                let better = match &best {
                    None => true,
                    Some((bu, bv, bc, _, _)) => {
                        (unit && !bu) || (unit == *bu && (v < *bv || (v == *bv && cost < *bc)))
                    }
                };
                if better {
                    best = Some((unit, v, cost, i, j));
                    if unit && cost == 0 {
                        return Some((i, j));
                    }
                }
            }
        }
        best.map(|b| (b.3, b.4))
    }
}

/// Nonzero invariant factors of an integer matrix, in divisibility order.
pub fn invariant_factors(a: &ExactMatrix) -> Result<Vec<BigInt>> {
    let mut s = SparseInt::new(a.int_rows()?, a.cols());
    let mut diag: Vec<BigInt> = Vec::new();
    while let Some((mut r, mut c)) = s.choose_pivot() {
        loop {
            let p = s.entry(r, c).expect("pivot").clone();
            // clear column c with row operations
            let others: Vec<usize> = s.col_rows[c].iter().copied().filter(|&i| i != r).collect();
            let mut smaller: Option<(usize, usize)> = None;
            for i in others {
                let e = s.entry(i, c).expect("indexed").clone();
                let q = round_div(&e, &p);
                let new = s.rows[i].add_scaled(&-q, &s.rows[r]);
                s.replace_row(i, new);
                if let Some(rem) = s.entry(i, c) {
                    if smaller.is_none_or(|(si, sj)| rem.abs() < s.entry(si, sj).unwrap().abs()) {
                        smaller = Some((i, c));
                    }
                }
            }
            if let Some((i, j)) = smaller {
                r = i;
                c = j;
                continue;
            }
            // column c now holds only the pivot, so column operations touch row r only
            let reduced = s.rows[r].map(|e| e.clone());
            let reduced = SparseVec::from_sorted(
                reduced
                    .iter()
                    .map(|(j, e)| {
                        if *j == c {
                            (*j, e.clone())
                        } else {
                            (*j, e - round_div(e, &p) * &p)
                        }
                    })
                    .collect(),
            );
            s.replace_row(r, reduced);
            let rem = s.rows[r]
                .iter()
                .filter(|(j, _)| *j != c)
                .min_by(|x, y| x.1.abs().cmp(&y.1.abs()))
                .map(|(j, _)| *j);
            match rem {
                Some(j) => {
                    c = j;
                }
                None => {
                    diag.push(p.abs());
                    s.replace_row(r, SparseVec::new());
                    break;
                }
            }
        }
    }
    Ok(normalize_diagonal(diag))
}

/// Turns a diagonal into invariant-factor form via pairwise gcd/lcm.
pub(crate) fn normalize_diagonal(diag: Vec<BigInt>) -> Vec<BigInt> {
    let units = diag.iter().filter(|d| d.is_one()).count();
    let mut rest: Vec<BigInt> = diag.into_iter().filter(|d| !d.is_one()).collect();
    for i in 0..rest.len() {
        for j in i + 1..rest.len() {
            let g = rest[i].gcd(&rest[j]);
            let l = rest[i].lcm(&rest[j]);
            rest[i] = g;
            rest[j] = l;
        }
    }
    // the pairwise pass leaves a divisibility chain, so any new units lead it
    let mut out = vec![BigInt::one(); units];
    out.extend(rest);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::scalar::Scalar;
    use proptest::prelude::*;

    fn det(m: &ExactMatrix) -> Scalar {
        // fraction-based elimination; fine for test sizes
        let n = m.rows();
        let mut a: Vec<Vec<Scalar>> = (0..n)
            .map(|i| (0..n).map(|j| m.get(i, j)).collect())
            .collect();
        let mut d = Scalar::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Scalar::zero();
            };
            if p != k {
                a.swap(p, k);
                d = -d;
            }
            d = &d * &a[k][k];
            for i in k + 1..n {
                let f = &a[i][k] / &a[k][k];
                for j in k..n {
                    let t = &f * &a[k][j];
                    a[i][j] = &a[i][j] - &t;
                }
            }
        }
        d
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|x| BigInt::from(*x)).collect()
    }

    #[test]
    fn small_cases() {
        let z = snf(&ExactMatrix::zero(3, 2)).unwrap();
        assert!(z.invariant_factors.is_empty());
        assert!(z.d.is_zero());
        let id = snf(&ExactMatrix::identity(4)).unwrap();
        assert_eq!(id.invariant_factors, ints(&[1, 1, 1, 1]));
        let d = snf(&ExactMatrix::from_dense_i64(&[vec![2, 0], vec![0, 3]])).unwrap();
        assert_eq!(d.invariant_factors, ints(&[1, 6]));
        assert_eq!(
            invariant_factors(&ExactMatrix::from_dense_i64(&[vec![2, 0], vec![0, 3]])).unwrap(),
            ints(&[1, 6])
        );
    }

    #[test]
    fn rejects_fractions() {
        let a = ExactMatrix::from_triplets(1, 1, [(0, 0, Scalar::from_ratio(1, 2))]).unwrap();
        assert!(snf(&a).is_err());
        assert!(invariant_factors(&a).is_err());
    }

    #[test]
    fn hand_reduced_example() {
        // [[2,4,4],[-6,6,12],[10,-4,-16]] has invariant factors 2, 6, 12
        let a = ExactMatrix::from_dense_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(snf(&a).unwrap().invariant_factors, ints(&[2, 6, 12]));
        assert_eq!(invariant_factors(&a).unwrap(), ints(&[2, 6, 12]));
    }

    fn matrix_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=30, 1usize..=30).prop_flat_map(|(m, n)| {
            proptest::collection::vec(proptest::collection::vec(-9i64..=9, n), m)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn decomposition_invariants(rows in matrix_strategy()) {
            let a = ExactMatrix::from_dense_i64(&rows);
            let s = snf(&a).unwrap();
            let uav = s.u.mul(&a).unwrap().mul(&s.v).unwrap();
            prop_assert_eq!(&uav, &s.d);
            for (i, j, _) in s.d.triplets() {
                prop_assert_eq!(i, j);
            }
            prop_assert_eq!(det(&s.u).abs(), Scalar::one());
            prop_assert_eq!(det(&s.v).abs(), Scalar::one());
            for w in s.invariant_factors.windows(2) {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
            for (k, f) in s.invariant_factors.iter().enumerate() {
                prop_assert!(f.is_positive());
                prop_assert_eq!(s.d.get(k, k), Scalar::from_bigint(f.clone()));
            }
            prop_assert_eq!(invariant_factors(&a).unwrap(), s.invariant_factors.clone());
            prop_assert_eq!(crate::exact_linalg::rank_q(&a), s.rank());
        }

        #[test]
        fn sparse_matches_dense_on_sparse_input(rows in proptest::collection::vec(
            proptest::collection::vec(prop_oneof![6 => Just(0i64), 1 => -3i64..=3], 12), 1..12)) {
            let a = ExactMatrix::from_dense_i64(&rows);
            prop_assert_eq!(invariant_factors(&a).unwrap(), snf(&a).unwrap().invariant_factors);
        }
    }
}
