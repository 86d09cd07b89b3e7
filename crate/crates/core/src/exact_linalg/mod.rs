//! Exact linear algebra over Z and Q.

mod echelon;
mod scalar;
mod snf;
mod sparse;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

pub use echelon::{FieldEchelon, IntEchelon, LatticeBasis, SubspaceBasis};
pub use scalar::Scalar;
pub use snf::{invariant_factors, snf, SmithDecomposition};
pub use sparse::{Coeff, ExactMatrix, MatrixJson, SparseVec};

use crate::error::{Error, Result};

/// Coefficient ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Q,
    Z,
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ring::Q => "Q",
            Ring::Z => "Z",
        })
    }
}

/// One homology group: a free rank plus torsion coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HomologyGroup {
    pub betti: usize,
    /// Each entry > 1 and dividing the next.
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }

    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion
            .iter()
            .map(|t| t.to_u64().unwrap_or(u64::MAX))
            .collect()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.betti > 0 {
            parts.push(if self.betti == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.betti)
            });
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// Rank over Q. Eliminates along whichever side has fewer vectors.
pub fn rank_q(a: &ExactMatrix) -> usize {
    let cap = a.rows().min(a.cols());
    let vecs: Vec<SparseVec<Scalar>> = if a.cols() <= a.rows() {
        a.columns().to_vec()
    } else {
        a.transpose().columns().to_vec()
    };
    let mut e = FieldEchelon::new();
    for v in &vecs {
        e.insert(v);
        if e.rank() == cap {
            break;
        }
    }
    e.rank()
}

/// Rank over Q of a matrix known to have rank at most `bound`. Columns are
/// eliminated one at a time and the scan stops as soon as the bound is met,
/// which is cheap for boundary matrices: short columns, and in acyclic
/// stretches the bound is attained early.
pub fn rank_q_bounded(a: &ExactMatrix, bound: usize) -> usize {
    let cap = bound.min(a.rows()).min(a.cols());
    let mut e = FieldEchelon::new();
    for c in a.columns() {
        if e.rank() == cap {
            break;
        }
        e.insert(c);
    }
    e.rank()
}

/// Solves `A x = b` over the given ring.
pub fn solve_exact(
    a: &ExactMatrix,
    b: &SparseVec<Scalar>,
    ring: Ring,
) -> Result<Option<SparseVec<Scalar>>> {
    if let Some(m) = b.max_index() {
        if m >= a.rows() {
            return Err(Error::invalid(format!(
                "right-hand side has index {m}, matrix has {} rows",
                a.rows()
            )));
        }
    }
    match ring {
        Ring::Q => {
            let mut e = FieldEchelon::with_tracking();
            for c in a.columns() {
                e.insert(c);
            }
            Ok(e.express(b))
        }
        Ring::Z => {
            if !a.is_integer() {
                return Err(Error::invalid("integer solve needs an integer matrix"));
            }
            let Some(bz) = to_int_vec(b) else {
                return Ok(None);
            };
            let mut e = IntEchelon::with_tracking();
            for c in a.columns() {
                e.insert(&to_int_vec(c).expect("checked integral"));
            }
            Ok(e.express(&bz)
                .map(|x| x.map(|v| Scalar::from_bigint(v.clone()))))
        }
    }
}

pub(crate) fn to_int_vec(v: &SparseVec<Scalar>) -> Option<SparseVec<BigInt>> {
    let mut out = Vec::with_capacity(v.nnz());
    for (i, x) in v.iter() {
        out.push((*i, x.to_bigint()?));
    }
    Some(SparseVec::from_sorted(out))
}

pub(crate) fn to_scalar_vec(v: &SparseVec<BigInt>) -> SparseVec<Scalar> {
    v.map(|x| Scalar::from_bigint(x.clone()))
}

/// Hermite basis of the integer span of the generators, one row per basis vector.
pub fn hnf_basis(generators: &[SparseVec<BigInt>], len: usize) -> Result<ExactMatrix> {
    let mut e = IntEchelon::new();
    for (k, g) in generators.iter().enumerate() {
        if g.max_index().is_some_and(|m| m >= len) {
            return Err(Error::invalid(format!(
                "generator {k} is longer than {len}"
            )));
        }
        e.insert(g);
    }
    let basis = e.into_basis();
    let cols: Vec<SparseVec<Scalar>> = basis.rows().iter().map(to_scalar_vec).collect();
    Ok(ExactMatrix::from_columns(len, cols)?.transpose())
}

/// Homology of `C_{n+1} --d_in--> C_n --d_out--> C_{n-1}` at the middle term.
pub fn homology_of_pair(
    d_out: &ExactMatrix,
    d_in: &ExactMatrix,
    ring: Ring,
) -> Result<HomologyGroup> {
    let mid = d_out.cols();
    if d_in.rows() != mid {
        return Err(Error::invalid(format!(
            "incompatible shapes: d_out has {mid} columns, d_in has {} rows",
            d_in.rows()
        )));
    }
    for (j, c) in d_in.columns().iter().enumerate() {
        if !d_out.apply(c).is_zero() {
            return Err(Error::contract(format!(
                "boundary of boundary is nonzero on column {j}"
            )));
        }
    }
    let r_out = rank_q(d_out);
    match ring {
        Ring::Q => {
            // im(d_in) lies in ker(d_out)
            let r_in = rank_q_bounded(d_in, mid - r_out);
            Ok(HomologyGroup {
                betti: mid - r_out - r_in,
                torsion: Vec::new(),
            })
        }
        Ring::Z => {
            // ker(d_out) is saturated, so the torsion of ker/im is the torsion of Z^mid/im
            let f = invariant_factors(d_in)?;
            Ok(HomologyGroup {
                betti: mid - r_out - f.len(),
                torsion: f.into_iter().filter(|x| !x.is_one()).collect(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qv(p: &[i64]) -> SparseVec<Scalar> {
        SparseVec::from_pairs(p.iter().enumerate().map(|(i, v)| (i, Scalar::from_int(*v))))
    }

    fn zv(p: &[i64]) -> SparseVec<BigInt> {
        SparseVec::from_pairs(p.iter().enumerate().map(|(i, v)| (i, BigInt::from(*v))))
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_q(&ExactMatrix::identity(5)), 5);
        assert_eq!(rank_q(&ExactMatrix::zero(4, 3)), 0);
        // edges 01, 02, 12 of the hollow triangle, boundary into vertices
        let d1 = ExactMatrix::from_dense_i64(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]]);
        assert_eq!(rank_q(&d1), 2);
    }

    #[test]
    fn solve_examples() {
        let b = qv(&[3, -1, 7]);
        assert_eq!(
            solve_exact(&ExactMatrix::identity(3), &b, Ring::Z).unwrap(),
            Some(b.clone())
        );
        let two = ExactMatrix::from_dense_i64(&[vec![2]]);
        assert_eq!(solve_exact(&two, &qv(&[1]), Ring::Z).unwrap(), None);
        assert_eq!(
            solve_exact(&two, &qv(&[1]), Ring::Q).unwrap(),
            Some(SparseVec::unit(0, Scalar::from_ratio(1, 2)))
        );
        assert!(solve_exact(&two, &qv(&[1, 1]), Ring::Q).is_err());
    }

    /// Lattice points of span(gens) inside a box, by brute-force combination.
    fn box_points(
        gens: &[Vec<i64>],
        coef: i64,
        bound: i64,
    ) -> std::collections::BTreeSet<Vec<i64>> {
        let k = gens.len();
        let mut out = std::collections::BTreeSet::new();
        let mut c = vec![-coef; k];
        loop {
            let mut p = vec![0i64; gens[0].len()];
            for (g, x) in gens.iter().zip(&c) {
                for (pi, gi) in p.iter_mut().zip(g) {
                    *pi += gi * x;
                }
            }
            if p.iter().all(|v| v.abs() <= bound) {
                out.insert(p);
            }
            let mut i = 0;
            while i < k {
                c[i] += 1;
                if c[i] <= coef {
                    break;
                }
                c[i] = -coef;
                i += 1;
            }
            if i == k {
                return out;
            }
        }
    }

    #[test]
    fn hnf_index_two_lattice() {
        let gens = [zv(&[2, 0]), zv(&[0, 2]), zv(&[1, 1])];
        let h = hnf_basis(&gens, 2).unwrap();
        assert_eq!(h.rows(), 2);
        let rows: Vec<Vec<i64>> = (0..2)
            .map(|i| {
                (0..2)
                    .map(|j| h.get(i, j).numer().try_into().unwrap())
                    .collect()
            })
            .collect();
        assert_eq!(rows, vec![vec![1, 1], vec![0, 2]]);
        let a = box_points(&rows, 6, 4);
        let b = box_points(&[vec![2, 0], vec![0, 2], vec![1, 1]], 6, 4);
        assert_eq!(a, b);
        assert!(a.contains(&vec![1, 1]) && a.contains(&vec![2, 0]) && !a.contains(&vec![1, 0]));
        assert_eq!(
            hnf_basis(&[zv(&[1, 0]), zv(&[0, 1])], 2).unwrap(),
            ExactMatrix::identity(2)
        );
        assert_eq!(hnf_basis(&[], 3).unwrap().rows(), 0);
    }

    #[test]
    fn homology_examples() {
        let h =
            homology_of_pair(&ExactMatrix::zero(0, 3), &ExactMatrix::zero(3, 0), Ring::Q).unwrap();
        assert_eq!(h.betti, 3);
        // hollow triangle: C_1 -> C_0 with C_2 = 0, augmented so d_0 is the sum map
        let d1 = ExactMatrix::from_dense_i64(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]]);
        let h1 = homology_of_pair(&d1, &ExactMatrix::zero(3, 0), Ring::Q).unwrap();
        assert_eq!(h1.betti, 1);
        let d0 = ExactMatrix::from_dense_i64(&[vec![1, 1, 1]]);
        assert_eq!(
            homology_of_pair(&d0, &d1, Ring::Z).unwrap(),
            HomologyGroup::default()
        );
        let t = homology_of_pair(
            &ExactMatrix::zero(0, 1),
            &ExactMatrix::from_dense_i64(&[vec![2]]),
            Ring::Z,
        )
        .unwrap();
        assert_eq!((t.betti, t.torsion.clone()), (0, vec![BigInt::from(2)]));
        assert_eq!(t.to_string(), "Z/2");
    }

    #[test]
    fn nonzero_composite_is_reported() {
        let a = ExactMatrix::from_dense_i64(&[vec![1]]);
        let err = homology_of_pair(&a, &a, Ring::Q).unwrap_err();
        assert!(matches!(err, Error::Contract(ref m) if m.contains("column 0")));
    }

    fn pair_strategy() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<Vec<i64>>)> {
        (1usize..7, 1usize..7, 1usize..7).prop_flat_map(|(a, m, b)| {
            (
                proptest::collection::vec(proptest::collection::vec(-3i64..=3, b), m),
                proptest::collection::vec(proptest::collection::vec(-3i64..=3, m), a),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn q_and_z_betti_agree((din, raw) in pair_strategy()) {
            let d_in = ExactMatrix::from_dense_i64(&din);
            // rows of d_out are integer combinations of left-kernel vectors of d_in
            let left = left_kernel(&d_in);
            let m = d_in.rows();
            let mut rows: Vec<SparseVec<Scalar>> = Vec::new();
            for (k, r) in raw.iter().enumerate() {
                let mut acc = SparseVec::<Scalar>::new();
                for (c, kv) in r.iter().zip(left.iter().cycle().skip(k)) {
                    acc = acc.add_scaled(&Scalar::from_int(*c), kv);
                }
                rows.push(acc);
            }
            let d_out = ExactMatrix::from_columns(m, rows).unwrap().transpose();
            let hq = homology_of_pair(&d_out, &d_in, Ring::Q).unwrap();
            let hz = homology_of_pair(&d_out, &d_in, Ring::Z).unwrap();
            prop_assert_eq!(hq.betti, hz.betti);
            prop_assert!(hq.torsion.is_empty());
        }

        #[test]
        fn hnf_span_equality(gens in proptest::collection::vec(proptest::collection::vec(-5i64..=5, 4), 0..6)) {
            let g: Vec<SparseVec<BigInt>> = gens.iter().map(|v| zv(v)).collect();
            let h = hnf_basis(&g, 4).unwrap();
            let basis_cols = h.transpose();
            let gen_mat = ExactMatrix::from_columns(4, g.iter().map(to_scalar_vec).collect()).unwrap();
            for v in &g {
                prop_assert!(solve_exact(&basis_cols, &to_scalar_vec(v), Ring::Z).unwrap().is_some());
            }
            for r in basis_cols.columns() {
                prop_assert!(solve_exact(&gen_mat, r, Ring::Z).unwrap().is_some());
            }
            prop_assert_eq!(h.rows(), rank_q(&gen_mat));
        }

        #[test]
        fn bounded_rank_agrees(rows in proptest::collection::vec(proptest::collection::vec(-3i64..=3, 6), 1..6),
                               slack in 0usize..3) {
            let a = ExactMatrix::from_dense_i64(&rows);
            let r = rank_q(&a);
            prop_assert_eq!(rank_q_bounded(&a, r + slack), r);
            prop_assert!(rank_q_bounded(&a, r.saturating_sub(1)) <= r);
        }

        #[test]
        fn solve_returns_true_solutions(rows in proptest::collection::vec(proptest::collection::vec(-4i64..=4, 5), 1..6),
                                        x in proptest::collection::vec(-3i64..=3, 5)) {
            let a = ExactMatrix::from_dense_i64(&rows);
            let b = a.apply(&qv(&x));
            for ring in [Ring::Q, Ring::Z] {
                let sol = solve_exact(&a, &b, ring).unwrap().expect("b is in the image");
                prop_assert_eq!(a.apply(&sol), b.clone());
            }
        }
    }

    /// Integer basis of {y : y^T A = 0}, by HNF of the augmented transpose.
    fn left_kernel(a: &ExactMatrix) -> Vec<SparseVec<Scalar>> {
        let m = a.rows();
        let n = a.cols();
        let t = a.transpose();
        // rows of [A | I]; echelon on the A part exposes the kernel rows
        let mut e = IntEchelon::new();
        for i in 0..m {
            let mut pairs: Vec<(usize, BigInt)> = t
                .column(i)
                .iter()
                .map(|(j, v)| (*j, v.to_bigint().unwrap()))
                .collect();
            pairs.push((n + i, <BigInt as One>::one()));
            e.insert(&SparseVec::from_pairs(pairs));
        }
        e.into_basis()
            .rows()
            .iter()
            .filter(|r| r.leading().is_some_and(|(p, _)| *p >= n))
            .map(|r| {
                SparseVec::from_sorted(
                    r.iter()
                        .map(|(j, v)| (j - n, Scalar::from_bigint(v.clone())))
                        .collect(),
                )
            })
            .collect()
    }
}
