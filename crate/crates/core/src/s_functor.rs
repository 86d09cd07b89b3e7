//! The functor `S` from cubical to simplicial modules: degree `n` of `SX` is
//! `X([1]^{n+1})` modulo cubical degeneracies, faces are differences of
//! opposite cube faces and degeneracies are positive connections.

use serde::{Deserialize, Serialize};

use crate::chain_modules::{
    all_generators, check_identities_on_basis, lattice_subcomplex, quotient_complex, span_dims,
    subspace_subcomplex, ChainModel, ComplexRep, LinearSystem, QVec, SubcomplexKind,
    SystemIdentityReport,
};
use crate::error::{Error, Result};
use crate::exact_linalg::{ExactMatrix, Ring, Scalar};
use crate::structure_maps::{Flags, Letter, Mode};

/// Sign conventions for the simplicial structure of `SX`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SSigns {
    /// `d_i = d_{i+1}^0 - d_{i+1}^1`, `s_i = γ_{i+1}^0`
    #[default]
    Standard,
    /// `s_i = -γ_{i+1}^0` and `d_i = d_{i+1}^1 - d_{i+1}^0`
    NegatedBoth,
    /// `s_i = -γ_{i+1}^0` with the standard faces; breaks `d_i s_i = id`
    NegatedDegeneracies,
}

impl SSigns {
    fn face(&self) -> i64 {
        if *self == SSigns::NegatedBoth {
            -1
        } else {
            1
        }
    }

    fn degeneracy(&self) -> i64 {
        if *self == SSigns::Standard {
            1
        } else {
            -1
        }
    }
}

/// `SX` for a cubical system `X`, as a simplicial linear system whose degree
/// `n` basis is the non-degenerate cubes of `X` in degree `n + 1`.
pub struct SSystem<'a> {
    source: ChainModel<'a>,
    signs: SSigns,
}

pub fn apply_s(x: &dyn LinearSystem) -> Result<SSystem<'_>> {
    apply_s_with(x, SSigns::Standard)
}

pub fn apply_s_with(x: &dyn LinearSystem, signs: SSigns) -> Result<SSystem<'_>> {
    if x.mode() != Mode::Cubical {
        return Err(Error::invalid("S takes a cubical system"));
    }
    Ok(SSystem {
        source: ChainModel::new(x),
        signs,
    })
}

impl<'a> SSystem<'a> {
    /// The cubical chain groups `SX` is built from.
    pub fn source(&self) -> &ChainModel<'a> {
        &self.source
    }

    pub fn signs(&self) -> SSigns {
        self.signs
    }
}

impl LinearSystem for SSystem<'_> {
    fn mode(&self) -> Mode {
        Mode::Simplicial
    }

    fn flags(&self) -> Flags {
        Flags {
            transpositions: self.source.flags().transpositions,
            reversals: false,
        }
    }

    fn min_degree(&self) -> i32 {
        self.source.lo() - 1
    }

    fn max_degree(&self) -> i32 {
        self.source.hi() - 1
    }

    fn dim(&self, n: i32) -> usize {
        self.source.dim(n + 1)
    }

    fn act(&self, letter: Letter, n: i32, b: usize) -> Option<QVec> {
        let m = n + 1;
        let v = QVec::unit(b, Scalar::one());
        let src = &self.source;
        match letter {
            Letter::Face(i) => {
                let d0 = src.act(Letter::CubeFace(i + 1, 0), m, &v).ok()?;
                let d1 = src.act(Letter::CubeFace(i + 1, 1), m, &v).ok()?;
                Some(d0.sub(&d1).scale(&Scalar::from_int(self.signs.face())))
            }
            Letter::Degeneracy(i) => {
                let g = src.act(Letter::Connection(i + 1, 0), m, &v).ok()?;
                Some(g.scale(&Scalar::from_int(self.signs.degeneracy())))
            }
            Letter::Transposition(i) if self.flags().transpositions => {
                src.act(Letter::Transposition(i + 1), m, &v).ok()
            }
            _ => None,
        }
    }

    fn label(&self, n: i32, b: usize) -> String {
        self.source.label(n + 1, b)
    }
}

/// Outcome of comparing two complexes degree by degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub degrees: Vec<i32>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<String>,
}

/// Compares `a` in degree `n` with `b` in degree `n + shift`, differentials
/// entry by entry.
fn compare_shifted(a: &ComplexRep, b: &ComplexRep, shift: i32) -> ComparisonReport {
    let degrees: Vec<i32> = (a.lo()..=a.hi()).collect();
    let mut first = None;
    if (a.lo() + shift, a.hi() + shift) != (b.lo(), b.hi()) {
        first = Some(format!(
            "degree ranges {}..={} and {}..={} do not match after the shift",
            a.lo(),
            a.hi(),
            b.lo(),
            b.hi()
        ));
    }
    for &n in &degrees {
        if first.is_some() {
            break;
        }
        let (da, db) = (a.differential(n), b.differential(n + shift));
        if (da.rows(), da.cols()) != (db.rows(), db.cols()) {
            first = Some(format!(
                "degree {n}: shapes {}x{} and {}x{}",
                da.rows(),
                da.cols(),
                db.rows(),
                db.cols()
            ));
            break;
        }
        first = first_entry_difference(&da, &db)
            .map(|(i, j, x, y)| format!("degree {n}: entry ({i}, {j}) is {x} vs {y}"));
    }
    ComparisonReport {
        degrees,
        pass: first.is_none(),
        first_difference: first,
    }
}

fn first_entry_difference(
    a: &ExactMatrix,
    b: &ExactMatrix,
) -> Option<(usize, usize, Scalar, Scalar)> {
    (0..a.cols()).find_map(|j| {
        if a.column(j) == b.column(j) {
            return None;
        }
        let i = a.column(j).sub(b.column(j)).leading()?.0;
        Some((i, j, a.get(i, j), b.get(i, j)))
    })
}

/// `C_* X = C_{*-1} SX`: the cubical complex of `X` and the simplicial complex
/// of `SX` have the same differential matrices after the shift.
pub fn check_complex_shift(x: &dyn LinearSystem, ring: Ring) -> Result<ComparisonReport> {
    let sx = apply_s(x)?;
    let cx = sx.source().complex(ring)?;
    let csx = ChainModel::new(&sx).complex(ring)?;
    Ok(compare_shifted(&cx, &csx, -1))
}

/// Chain groups divided by the degeneracy sub-complex.
pub fn moore_simplicial(x: &dyn LinearSystem, ring: Ring) -> Result<ComplexRep> {
    if x.mode() != Mode::Simplicial {
        return Err(Error::invalid(
            "the simplicial Moore complex needs a simplicial system",
        ));
    }
    let m = ChainModel::new(x);
    quotient_complex(&m.complex(ring)?, &all_generators(SubcomplexKind::Deg, &m)?)
}

/// Normalized cubical chains divided by the positive connections.
pub fn moore_cubical(x: &dyn LinearSystem, ring: Ring) -> Result<ComplexRep> {
    if x.mode() != Mode::Cubical {
        return Err(Error::invalid(
            "the cubical Moore complex needs a cubical system",
        ));
    }
    let m = ChainModel::new(x);
    quotient_complex(
        &m.complex(ring)?,
        &all_generators(SubcomplexKind::PosCon, &m)?,
    )
}

/// The cubical Moore complex of `X` against the simplicial Moore complex of `SX`.
pub fn check_moore_shift(x: &dyn LinearSystem, ring: Ring) -> Result<ComparisonReport> {
    let sx = apply_s(x)?;
    Ok(compare_shifted(
        &moore_cubical(x, ring)?,
        &moore_simplicial(&sx, ring)?,
        -1,
    ))
}

/// Homology of the positive-connection sub-complex, and its ranks against the
/// degeneracy sub-complex of `SX`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosConReport {
    pub ring: Ring,
    /// degrees in which homology was computed
    pub degrees: Vec<i32>,
    pub nonzero_homology: Vec<(i32, String)>,
    pub poscon_ranks: Vec<usize>,
    pub s_degeneracy_ranks: Vec<usize>,
    pub pass: bool,
}

pub fn check_poscon_acyclic(x: &dyn LinearSystem, ring: Ring) -> Result<PosConReport> {
    let sx = apply_s(x)?;
    let m = sx.source();
    let gens = all_generators(SubcomplexKind::PosCon, m)?;
    let c = m.complex(ring)?;
    let sub = match ring {
        Ring::Z => lattice_subcomplex(&gens, &c)?,
        Ring::Q => subspace_subcomplex(&gens, &c)?,
    };
    let hom = sub.complex.homology()?;
    let nonzero_homology: Vec<(i32, String)> = hom
        .iter()
        .filter(|h| !h.1.is_zero())
        .map(|(n, h)| (*n, h.to_string()))
        .collect();
    let sm = ChainModel::new(&sx);
    let poscon_ranks = span_dims(&gens);
    let s_degeneracy_ranks = span_dims(&all_generators(SubcomplexKind::Deg, &sm)?);
    Ok(PosConReport {
        ring,
        degrees: hom.iter().map(|h| h.0).collect(),
        pass: nonzero_homology.is_empty() && poscon_ranks == s_degeneracy_ranks,
        nonzero_homology,
        poscon_ranks,
        s_degeneracy_ranks,
    })
}

/// The relations checked on the basis of `SX`.
pub fn check_s_identities(x: &dyn LinearSystem, signs: SSigns) -> Result<SystemIdentityReport> {
    Ok(check_identities_on_basis(&apply_s_with(x, signs)?, None))
}

/// `S` of a morphism given on cells: `cells[k]` maps the cells of `X` in
/// degree `X.lo() + k` to cells of `Y`. Returns one matrix per degree of `SX`.
pub fn s_of_morphism(sx: &SSystem, sy: &SSystem, cells: &[Vec<usize>]) -> Result<Vec<ExactMatrix>> {
    let (mx, my) = (sx.source(), sy.source());
    if mx.lo() != my.lo() || cells.len() < (mx.hi() - mx.lo() + 1) as usize {
        return Err(Error::invalid(
            "cell map does not cover the degrees of the source",
        ));
    }
    (mx.lo()..=mx.hi().min(my.hi()))
        .map(|n| {
            let f = &cells[(n - mx.lo()) as usize];
            let cols = (0..mx.dim(n))
                .map(|j| {
                    let c = *f.get(mx.lift(n, j)).ok_or_else(|| {
                        Error::invalid(format!("cell map misses a cell in degree {n}"))
                    })?;
                    Ok(my.project(n, &QVec::unit(c, Scalar::one())))
                })
                .collect::<Result<Vec<_>>>()?;
            ExactMatrix::from_columns(my.dim(n), cols)
        })
        .collect()
}

/// `F ∘ g = g ∘ F` for every structure map `g` of `SX` and basis element.
pub fn check_morphism(sx: &SSystem, sy: &SSystem, maps: &[ExactMatrix]) -> Result<Option<String>> {
    let lo = sx.min_degree();
    let hi = sx.max_degree().min(sy.max_degree());
    let at = |n: i32| &maps[(n - lo) as usize];
    for n in lo..=hi {
        let mut letters: Vec<Letter> = Vec::new();
        if n >= 0 {
            letters.extend((0..=n as usize).map(Letter::Face));
            letters.extend((0..=n as usize).map(Letter::Degeneracy));
            if sx.flags().transpositions {
                letters.extend((0..n as usize).map(Letter::Transposition));
            }
        }
        for l in letters {
            let Some(d) = l
                .domain(Mode::Simplicial, n)
                .filter(|d| (lo..=hi).contains(d))
            else {
                continue;
            };
            for b in 0..sx.dim(n) {
                let Some(gx) = sx.act(l, n, b) else {
                    return Ok(Some(format!("{l} is undefined on degree {n}")));
                };
                let fb = at(n).apply(&QVec::unit(b, Scalar::one()));
                let lhs = at(d).apply(&gx);
                let mut rhs = QVec::new();
                for (k, c) in fb.iter() {
                    let img = sy
                        .act(l, n, *k)
                        .ok_or_else(|| Error::invalid(format!("{l} is undefined on the target")))?;
                    rhs = rhs.add_scaled(c, &img);
                }
                if lhs != rhs {
                    return Ok(Some(format!("{l} on {}", sx.label(n, b))));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain_modules::{free_linear, CellSystem};
    use crate::generators::{
        counterexample_y, inclusion, n1_graph, or_a, FacetComplex, SimpleGraph, YKind,
    };

    #[test]
    fn basic_structure() {
        let sys = n1_graph(&SimpleGraph::complete(2), 4, 200_000).unwrap();
        let f = free_linear(&sys);
        let sx = apply_s(&f).unwrap();
        let nondeg_edges = (0..sys.num_cells(1))
            .filter(|&c| !f.is_degenerate(1, c))
            .count();
        assert_eq!(sx.dim(0), nondeg_edges);
        assert_eq!(sx.min_degree(), -1);
        // d_i s_i = id on every basis element
        for n in 0..2 {
            for b in 0..sx.dim(n) {
                for i in 0..=n as usize {
                    let s = sx.act(Letter::Degeneracy(i), n, b).unwrap();
                    let mut back = QVec::new();
                    for (k, c) in s.iter() {
                        back = back.add_scaled(c, &sx.act(Letter::Face(i), n + 1, *k).unwrap());
                    }
                    assert_eq!(back, QVec::unit(b, Scalar::one()));
                }
            }
        }
    }

    #[test]
    fn relations_under_each_sign_choice() {
        let sys = n1_graph(&SimpleGraph::complete(2), 4, 200_000).unwrap();
        let f = free_linear(&sys);
        let r = check_s_identities(&f, SSigns::Standard).unwrap();
        assert!(r.passed() && r.instances > 20, "{:?}", r.failures.first());
        assert!(check_s_identities(&f, SSigns::NegatedBoth)
            .unwrap()
            .passed());
        let bad = check_s_identities(&f, SSigns::NegatedDegeneracies).unwrap();
        assert!(!bad.passed());
        assert!(bad.failures.iter().all(|x| x.identity == "degeneracy_face"));
    }

    #[test]
    fn complexes_agree_after_shift() {
        let sys = n1_graph(&SimpleGraph::cycle(5), 3, 200_000).unwrap();
        let f = free_linear(&sys);
        for ring in [Ring::Z, Ring::Q] {
            let r = check_complex_shift(&f, ring).unwrap();
            assert!(r.pass, "{r:?}");
            assert!(check_moore_shift(&f, ring).unwrap().pass);
            assert!(check_poscon_acyclic(&f, ring).unwrap().pass);
        }
        let y = counterexample_y(YKind::R, 4).unwrap();
        let fy = free_linear(&y);
        assert!(check_complex_shift(&fy, Ring::Z).unwrap().pass);
        let p = check_poscon_acyclic(&fy, Ring::Z).unwrap();
        assert!(p.pass, "{p:?}");
        assert_eq!(p.degrees, [0, 1, 2, 3]);
    }

    #[test]
    fn simplicial_moore_complex() {
        let k = FacetComplex::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let o = or_a(&k, &[0, 1, 2], 3, 1000).unwrap();
        let f = free_linear(&o);
        let n = moore_simplicial(&f, Ring::Z).unwrap();
        assert_eq!(n.dims(), [(-1, 1), (0, 3), (1, 3), (2, 0), (3, 0)]);
        let full = ChainModel::new(&f).complex(Ring::Z).unwrap();
        assert_eq!(n.homology().unwrap(), full.homology().unwrap());
    }

    #[test]
    fn functorial_on_inclusions() {
        let path = SimpleGraph::new(
            vec!["0".into(), "1".into(), "2".into()],
            vec![(0, 1), (1, 2)],
        )
        .unwrap();
        let tri = SimpleGraph::complete(3);
        let gp = n1_graph(&path, 3, 200_000).unwrap();
        let gt = n1_graph(&tri, 3, 200_000).unwrap();
        let (fp, ft) = (free_linear(&gp), free_linear(&gt));
        let (sp, st) = (apply_s(&fp).unwrap(), apply_s(&ft).unwrap());
        let cells = inclusion(&gp, &gt).unwrap();
        let maps = s_of_morphism(&sp, &st, &cells).unwrap();
        assert_eq!(check_morphism(&sp, &st, &maps).unwrap(), None);
        // S of the identity is the identity
        let id: Vec<Vec<usize>> = (0..=3).map(|n| (0..gp.num_cells(n)).collect()).collect();
        let maps = s_of_morphism(&sp, &sp, &id).unwrap();
        assert!(maps.iter().all(|m| *m == ExactMatrix::identity(m.cols())));
        // composite of inclusions
        let k4 = n1_graph(&SimpleGraph::complete(4), 3, 2_000_000).unwrap();
        let f4 = free_linear(&k4);
        let s4 = apply_s(&f4).unwrap();
        let a = s_of_morphism(&st, &s4, &inclusion(&gt, &k4).unwrap()).unwrap();
        let direct = s_of_morphism(&sp, &s4, &inclusion(&gp, &k4).unwrap()).unwrap();
        let b = s_of_morphism(&sp, &st, &cells).unwrap();
        for k in 0..direct.len() {
            assert_eq!(a[k].mul(&b[k]).unwrap(), direct[k]);
        }
    }

    #[test]
    fn rejects_simplicial_input() {
        let k = FacetComplex::new(vec!["a".into()], vec![vec![0]]).unwrap();
        let o = or_a(&k, &[0], 1, 10).unwrap();
        assert!(apply_s(&free_linear(&o)).is_err());
    }
}
