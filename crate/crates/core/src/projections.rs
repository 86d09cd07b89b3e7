//! Signed group averages over symmetry groups acting on chain groups, the
//! chain homotopies that contract them to the identity, and their images.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::chain_modules::{Chain, ChainModel, ComplexRep, QVec};
use crate::error::{Error, Result};
use crate::exact_linalg::{ExactMatrix, FieldEchelon, Ring, Scalar, SparseVec, SubspaceBasis};
use crate::structure_maps::{generator_fn, FiniteMap, Letter, Mode};
use crate::symmetries::DEFAULT_GROUP_CAP;

/// The groups averaged over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    /// permutations of the first `k + 1` entries of a simplex
    Sym(i32),
    /// reversals of the first `k` cube coordinates
    Rev(i32),
    /// all coordinate permutations of the cube
    CubePerm,
    /// coordinate permutations and reversals of the cube
    Hyperoct,
}

impl Group {
    fn letters(&self, n: i32) -> Vec<Letter> {
        let nu = n.max(0) as usize;
        match *self {
            Group::Sym(k) => (0..k.max(0) as usize).map(Letter::Transposition).collect(),
            Group::Rev(k) => (1..=k.max(0) as usize).map(Letter::Reversal).collect(),
            Group::CubePerm => (1..nu).map(Letter::Transposition).collect(),
            Group::Hyperoct => (1..nu)
                .map(Letter::Transposition)
                .chain((1..=nu).map(Letter::Reversal))
                .collect(),
        }
    }

    fn order(&self, n: i32) -> u128 {
        let fact = |m: i32| (1..=m.max(0) as u128).product::<u128>();
        match *self {
            Group::Sym(k) => fact(k + 1),
            Group::Rev(k) => 1u128 << k.max(0),
            Group::CubePerm => fact(n),
            Group::Hyperoct => fact(n) << n.max(0),
        }
    }

    fn mode(&self) -> Mode {
        match self {
            Group::Sym(_) => Mode::Simplicial,
            _ => Mode::Cubical,
        }
    }
}

/// `(1/|G|) Σ sgn(g) g` on the chain group of one degree, with every group
/// element reached as `parent ∘ generator`.
pub struct Projector {
    n: i32,
    order: i64,
    steps: Vec<(u32, u8)>,
    tables: Vec<Vec<(u32, i8)>>,
    cache: Vec<OnceLock<Arc<SparseVec<i64>>>>,
}

impl Projector {
    pub fn new(model: &ChainModel, group: Group, n: i32, cap: u64) -> Result<Self> {
        if group.mode() != model.mode() {
            return Err(Error::invalid(format!(
                "{group:?} does not act on a {:?} system",
                model.mode()
            )));
        }
        if !model.contains(n) {
            return Err(Error::invalid(format!("degree {n} is not built")));
        }
        let order = group.order(n);
        if order > cap as u128 {
            return Err(Error::resource(format!(
                "group of order {order} in degree {n} exceeds the cap {cap}"
            )));
        }
        let letters = group.letters(n);
        for l in &letters {
            if !l.allowed(model.flags()) {
                return Err(Error::invalid(format!("the system has no {l} symmetry")));
            }
        }
        let gens: Vec<FiniteMap> = letters
            .iter()
            .map(|l| generator_fn(model.mode(), *l, n))
            .collect::<Result<_>>()?;
        let tables = letters
            .iter()
            .map(|l| model.signed_permutation(*l, n))
            .collect::<Result<Vec<_>>>()?;
        let id = FiniteMap::identity(model.mode(), n);
        let mut seen: HashMap<Vec<u32>, u32> = HashMap::from([(id.table().to_vec(), 0)]);
        let mut elems = vec![id];
        let mut steps = vec![(0u32, 0u8)];
        let mut head = 0;
        while head < elems.len() {
            for (gi, g) in gens.iter().enumerate() {
                let e = elems[head].compose(g)?;
                if !seen.contains_key(e.table()) {
                    seen.insert(e.table().to_vec(), elems.len() as u32);
                    steps.push((head as u32, gi as u8));
                    elems.push(e);
                }
            }
            head += 1;
        }
        if elems.len() as u128 != order {
            return Err(Error::contract(format!(
                "generators produced {} elements, expected {order}",
                elems.len()
            )));
        }
        let dim = model.dim(n);
        Ok(Projector {
            n,
            order: order as i64,
            steps,
            tables,
            cache: (0..dim).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn degree(&self) -> i32 {
        self.n
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Images `(index, sign · sgn(g))` of basis element `j` under every group element.
    pub fn orbit_terms(&self, j: usize) -> Vec<(u32, i64)> {
        let mut img: Vec<(u32, i8, i8)> = Vec::with_capacity(self.steps.len());
        img.push((j as u32, 1, 1));
        for &(p, g) in &self.steps[1..] {
            let (idx, s, sg) = img[p as usize];
            let (k, t) = self.tables[g as usize][idx as usize];
            img.push((k, s * t, -sg));
        }
        img.into_iter()
            .map(|(k, s, sg)| (k, (s * sg) as i64))
            .collect()
    }

    /// `|G| · P(e_j)`.
    pub fn column_scaled_uncached(&self, j: usize) -> SparseVec<i64> {
        let mut terms = self.orbit_terms(j);
        terms.sort_unstable_by_key(|t| t.0);
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (k, c) in terms {
            match out.last_mut() {
                Some((i, x)) if *i == k as usize => *x += c,
                _ => out.push((k as usize, c)),
            }
        }
        out.retain(|e| e.1 != 0);
        SparseVec::from_sorted(out)
    }

    pub fn column_scaled(&self, j: usize) -> Arc<SparseVec<i64>> {
        self.cache[j]
            .get_or_init(|| Arc::new(self.column_scaled_uncached(j)))
            .clone()
    }

    pub fn apply(&self, v: &QVec) -> QVec {
        let inv = Scalar::from_ratio(1, self.order);
        let mut acc: HashMap<usize, Scalar> = HashMap::new();
        for (j, c) in v.iter() {
            let cc = c * &inv;
            for (k, x) in self.column_scaled(*j).iter() {
                let e = acc.entry(*k).or_insert_with(Scalar::zero);
                *e = &*e + &(&cc * &Scalar::from_int(*x));
            }
        }
        QVec::from_pairs(acc)
    }

    pub fn matrix(&self) -> Result<ExactMatrix> {
        let inv = Scalar::from_ratio(1, self.order);
        let cols = (0..self.cache.len())
            .map(|j| self.column_scaled(j).map(|x| &Scalar::from_int(*x) * &inv))
            .collect();
        ExactMatrix::from_columns(self.cache.len(), cols)
    }

    /// Verifies `P² = P` one orbit at a time (each orbit spans a `P`-stable block).
    /// Returns the first offending basis index.
    pub fn check_idempotent(&self) -> std::result::Result<(), usize> {
        let dim = self.cache.len();
        let mut done = vec![false; dim];
        let mut acc = vec![0i64; dim];
        for start in 0..dim {
            if done[start] {
                continue;
            }
            let mut orbit: Vec<u32> = self.orbit_terms(start).iter().map(|t| t.0).collect();
            orbit.sort_unstable();
            orbit.dedup();
            let cols: HashMap<u32, SparseVec<i64>> = orbit
                .iter()
                .map(|&k| (k, self.column_scaled_uncached(k as usize)))
                .collect();
            for &k in &orbit {
                done[k as usize] = true;
            }
            match self.rank_one_block(&orbit, &cols) {
                Some(Ok(())) => continue,
                Some(Err(k)) => return Err(k),
                None => {}
            }
            for &k in &orbit {
                let col = &cols[&k];
                let mut touched = Vec::new();
                for (i, c) in col.iter() {
                    let Some(inner) = cols.get(&(*i as u32)) else {
                        return Err(k as usize);
                    };
                    for (r, x) in inner.iter() {
                        if acc[*r] == 0 {
                            touched.push(*r);
                        }
                        acc[*r] += c * x;
                    }
                }
                // |G|² P²(e_k) against |G|² P(e_k)
                let mut ok = true;
                for (r, x) in col.iter() {
                    if acc[*r] != x * self.order {
                        ok = false;
                    }
                }
                for &r in &touched {
                    if acc[r] != 0 && col.get(r).is_none() {
                        ok = false;
                    }
                    acc[r] = 0;
                }
                if !ok {
                    return Err(k as usize);
                }
            }
        }
        Ok(())
    }

    /// When every column of the orbit block is a multiple of one column `v`,
    /// the block is `v wᵀ` and `B² = |G| B` reduces to `w·v = |G|`, checked
    /// here in integers after verifying the factorization entry by entry.
    /// `None` means the block is not of that shape.
    fn rank_one_block(
        &self,
        orbit: &[u32],
        cols: &HashMap<u32, SparseVec<i64>>,
    ) -> Option<std::result::Result<(), usize>> {
        let Some(v) = orbit.iter().map(|k| &cols[k]).find(|c| !c.is_zero()) else {
            return Some(Ok(()));
        };
        let &(i0, v0) = v.leading()?;
        let (v0, mut wv) = (v0 as i128, 0i128);
        for &k in orbit {
            let c = &cols[&k];
            let c0 = c.get(i0).map_or(0, |x| *x as i128);
            // c = (c0 / v0) v, compared as v0 c = c0 v
            if c.entries().len() != if c0 == 0 { 0 } else { v.entries().len() } {
                return None;
            }
            for ((a, x), (b, y)) in c.iter().zip(v.iter()) {
                if a != b || v0 * *x as i128 != c0 * *y as i128 {
                    return None;
                }
            }
            let vk = v.get(k as usize).map_or(0, |x| *x as i128);
            wv += c0 * vk;
        }
        // w = (column values at i0) / v0, so w·v = wv / v0
        if wv != self.order as i128 * v0 {
            return Some(Err(orbit[0] as usize));
        }
        // columns must stay inside the orbit for the block to be closed
        if v.iter()
            .any(|(i, _)| orbit.binary_search(&(*i as u32)).is_err())
        {
            return Some(Err(orbit[0] as usize));
        }
        Some(Ok(()))
    }
}

/// Operators on the chain groups of one model, evaluated per basis element
/// and memoized.
pub struct Operators<'m, 'a> {
    model: &'m ChainModel<'a>,
    cap: u64,
    cache: Mutex<HashMap<(Group, i32), Arc<Projector>>>,
}

/// Which operator to materialize.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    /// `p^{k,n}`
    PSym(i32),
    /// `p^{n,n}`
    PX,
    /// `h_n`, degree +1
    H,
    /// `p̃^{k,n}`
    QRev(i32),
    /// `p̃^{n,n}`
    QX,
    /// `h̃_n`, degree +1
    HRev,
    /// hyperoctahedral average
    U,
    /// average over coordinate permutations of the cube
    PT,
    Identity,
}

impl<'m, 'a> Operators<'m, 'a> {
    pub fn new(model: &'m ChainModel<'a>, ring: Ring) -> Result<Self> {
        Self::with_cap(model, ring, DEFAULT_GROUP_CAP)
    }

    pub fn with_cap(model: &'m ChainModel<'a>, ring: Ring, cap: u64) -> Result<Self> {
        if ring != Ring::Q {
            return Err(Error::unsupported(
                "averaging operators divide by group orders and need a field of characteristic 0",
            ));
        }
        Ok(Operators {
            model,
            cap,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn model(&self) -> &'m ChainModel<'a> {
        self.model
    }

    pub fn projector(&self, g: Group, n: i32) -> Result<Arc<Projector>> {
        if let Some(p) = self.cache.lock().expect("not poisoned").get(&(g, n)) {
            return Ok(p.clone());
        }
        let p = Arc::new(Projector::new(self.model, g, n, self.cap)?);
        self.cache
            .lock()
            .expect("not poisoned")
            .insert((g, n), p.clone());
        Ok(p)
    }

    fn need(&self, mode: Mode) -> Result<()> {
        if self.model.mode() != mode {
            return Err(Error::invalid(format!("operator needs a {mode:?} system")));
        }
        Ok(())
    }

    fn check_chain(&self, x: &Chain) -> Result<()> {
        if !self.model.contains(x.degree) {
            return Err(Error::invalid(format!("degree {} is not built", x.degree)));
        }
        if x.coeffs
            .max_index()
            .is_some_and(|m| m >= self.model.dim(x.degree))
        {
            return Err(Error::invalid("chain index out of range"));
        }
        Ok(())
    }

    /// `p^{k,n}`; the identity for `k <= 0`.
    pub fn p_sym(&self, k: i32, x: &Chain) -> Result<Chain> {
        self.need(Mode::Simplicial)?;
        self.check_chain(x)?;
        if k <= 0 {
            return Ok(x.clone());
        }
        if k > x.degree {
            return Err(Error::invalid(format!(
                "p^{{{k},{}}} needs k <= n",
                x.degree
            )));
        }
        Ok(Chain::new(
            x.degree,
            self.projector(Group::Sym(k), x.degree)?.apply(&x.coeffs),
        ))
    }

    /// `h_n(x) = Σ_{k=0}^n (-1)^k p^{k,n+1} s_k x`.
    pub fn h_sym(&self, x: &Chain) -> Result<Chain> {
        self.need(Mode::Simplicial)?;
        self.check_chain(x)?;
        let n = x.degree;
        let mut acc = QVec::new();
        for k in 0..=n {
            let s = self
                .model
                .act(Letter::Degeneracy(k as usize), n, &x.coeffs)?;
            let p = self.p_sym(k, &Chain::new(n + 1, s))?;
            acc = acc.add_scaled(&sign(k), &p.coeffs);
        }
        Ok(Chain::new(n + 1, acc))
    }

    /// `p̃^{k,n}`; the identity for `k = 0`.
    pub fn q_rev(&self, k: i32, x: &Chain) -> Result<Chain> {
        self.need(Mode::Cubical)?;
        self.check_chain(x)?;
        if k > x.degree || k < 0 {
            return Err(Error::invalid(format!(
                "q^{{{k},{}}} needs 0 <= k <= n",
                x.degree
            )));
        }
        if k == 0 {
            return Ok(x.clone());
        }
        Ok(Chain::new(
            x.degree,
            self.projector(Group::Rev(k), x.degree)?.apply(&x.coeffs),
        ))
    }

    /// `h̃_n(x) = Σ_{k=1}^n (-1)^k p̃^{k,n+1} γ_k^0 x`.
    pub fn h_rev(&self, x: &Chain) -> Result<Chain> {
        self.need(Mode::Cubical)?;
        self.check_chain(x)?;
        let n = x.degree;
        let mut acc = QVec::new();
        for k in 1..=n {
            let g = self
                .model
                .act(Letter::Connection(k as usize, 0), n, &x.coeffs)?;
            let q = self.q_rev(k, &Chain::new(n + 1, g))?;
            acc = acc.add_scaled(&sign(k), &q.coeffs);
        }
        Ok(Chain::new(n + 1, acc))
    }

    pub fn u_hyper(&self, x: &Chain) -> Result<Chain> {
        self.need(Mode::Cubical)?;
        self.check_chain(x)?;
        Ok(Chain::new(
            x.degree,
            self.projector(Group::Hyperoct, x.degree)?.apply(&x.coeffs),
        ))
    }

    pub fn p_cubical_t(&self, x: &Chain) -> Result<Chain> {
        self.need(Mode::Cubical)?;
        self.check_chain(x)?;
        Ok(Chain::new(
            x.degree,
            self.projector(Group::CubePerm, x.degree)?.apply(&x.coeffs),
        ))
    }

    /// Applies `op` to a chain of degree `n`.
    pub fn apply(&self, op: Op, x: &Chain) -> Result<Chain> {
        let n = x.degree;
        match op {
            Op::PSym(k) => self.p_sym(k, x),
            Op::PX => self.p_sym(n, x),
            Op::H => self.h_sym(x),
            Op::QRev(k) => self.q_rev(k, x),
            Op::QX => self.q_rev(n, x),
            Op::HRev => self.h_rev(x),
            Op::U => self.u_hyper(x),
            Op::PT => self.p_cubical_t(x),
            Op::Identity => Ok(x.clone()),
        }
    }

    /// The matrix of `op` out of degree `n`.
    pub fn matrix(&self, op: Op, n: i32) -> Result<ExactMatrix> {
        let shift = matches!(op, Op::H | Op::HRev) as i32;
        let rows = self.model.dim(n + shift);
        if shift == 1 && !self.model.contains(n + 1) {
            return Err(Error::invalid(format!(
                "homotopy out of degree {n} needs degree {}",
                n + 1
            )));
        }
        let cols = (0..self.model.dim(n))
            .map(|j| Ok(self.apply(op, &Chain::basis(n, j))?.coeffs))
            .collect::<Result<Vec<_>>>()?;
        ExactMatrix::from_columns(rows, cols)
    }
}

fn sign(k: i32) -> Scalar {
    Scalar::from_int(if k % 2 == 0 { 1 } else { -1 })
}

/// Outcome of one operator law in one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub law: String,
    pub degree: i32,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl LawReport {
    fn new(law: impl Into<String>, degree: i32, witness: Option<String>) -> Self {
        LawReport {
            law: law.into(),
            degree,
            pass: witness.is_none(),
            witness,
        }
    }
}

fn first_difference(a: &ExactMatrix, b: &ExactMatrix) -> Option<String> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Some(format!(
            "shapes {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        ));
    }
    (0..a.cols()).find_map(|j| {
        (a.column(j) != b.column(j)).then(|| {
            let d = a.column(j).sub(b.column(j));
            let (i, x) = d.leading().cloned().expect("nonzero");
            format!("column {j}, row {i}: difference {x}")
        })
    })
}

/// The projector behind an averaging operator in degree `n`; `None` for the identity.
fn projector_of(ops: &Operators, op: Op, n: i32) -> Result<Option<Arc<Projector>>> {
    let g = match op {
        Op::PSym(k) if k <= 0 => return Ok(None),
        Op::PSym(k) => Group::Sym(k),
        Op::PX if n <= 0 => return Ok(None),
        Op::PX => Group::Sym(n),
        Op::QRev(k) if k <= 0 => return Ok(None),
        Op::QRev(k) => Group::Rev(k),
        Op::QX if n <= 0 => return Ok(None),
        Op::QX => Group::Rev(n),
        Op::U => Group::Hyperoct,
        Op::PT => Group::CubePerm,
        Op::Identity => return Ok(None),
        Op::H | Op::HRev => {
            return Err(Error::invalid(format!(
                "{op:?} is not an averaging operator"
            )))
        }
    };
    ops.projector(g, n).map(Some)
}

fn integer_columns(m: &ExactMatrix) -> Result<Vec<Vec<(usize, i128)>>> {
    m.columns()
        .iter()
        .map(|c| {
            c.iter()
                .map(|(i, x)| match x.as_small() {
                    Some((v, 1)) => Ok((*i, v as i128)),
                    _ => Err(Error::contract("boundary matrix is not integral")),
                })
                .collect()
        })
        .collect()
}

/// `∂ ∘ P = P ∘ ∂` out of every degree where both sides are defined, for an
/// averaging operator. Both sides are compared scaled by the two group orders.
pub fn check_chain_map(ops: &Operators, op: Op) -> Result<Vec<LawReport>> {
    let m = ops.model();
    let mut out = Vec::new();
    for n in (m.lo() + 1)..=m.hi() {
        let d = integer_columns(&m.differential(n)?)?;
        let (pn, pm) = (projector_of(ops, op, n)?, projector_of(ops, op, n - 1)?);
        let order = |p: &Option<Arc<Projector>>| p.as_ref().map_or(1, |p| p.order() as i128);
        let (on, om) = (order(&pn), order(&pm));
        let mut acc = vec![0i128; m.dim(n - 1)];
        let mut touched = Vec::new();
        let mut witness = None;
        let mut done = vec![false; m.dim(n)];
        'orbits: for start in 0..m.dim(n) {
            if done[start] {
                continue;
            }
            let members: Vec<usize> = match &pn {
                Some(p) => {
                    let mut o: Vec<usize> =
                        p.orbit_terms(start).iter().map(|t| t.0 as usize).collect();
                    o.sort_unstable();
                    o.dedup();
                    o
                }
                None => vec![start],
            };
            // ∂ of each distinct column up to sign; columns of one orbit repeat
            let mut memo: HashMap<Vec<(usize, i64)>, Vec<(usize, i128)>> = HashMap::new();
            for j in members {
                done[j] = true;
                let col = pn
                    .as_ref()
                    .map_or_else(|| SparseVec::unit(j, 1i64), |p| p.column_scaled_uncached(j));
                let flip = col.leading().is_some_and(|e| e.1 < 0);
                let key: Vec<(usize, i64)> = col
                    .iter()
                    .map(|&(k, c)| (k, if flip { -c } else { c }))
                    .collect();
                let lhs = memo.entry(key).or_insert_with_key(|key| {
                    let mut out: Vec<(usize, i128)> = Vec::new();
                    for (k, c) in key {
                        for &(i, e) in &d[*k] {
                            out.push((i, om * *c as i128 * e));
                        }
                    }
                    out.sort_unstable_by_key(|e| e.0);
                    let mut merged: Vec<(usize, i128)> = Vec::with_capacity(out.len());
                    for (i, x) in out {
                        match merged.last_mut() {
                            Some(last) if last.0 == i => last.1 += x,
                            _ => merged.push((i, x)),
                        }
                    }
                    merged.retain(|e| e.1 != 0);
                    merged
                });
                for &(i, x) in lhs.iter() {
                    acc[i] += if flip { -x } else { x };
                    touched.push(i);
                }
                for &(k, e) in &d[j] {
                    let add = |i: usize, c: i128, acc: &mut Vec<i128>, t: &mut Vec<usize>| {
                        acc[i] -= on * e * c;
                        t.push(i);
                    };
                    match &pm {
                        Some(p) => {
                            for (i, c) in p.column_scaled(k).iter() {
                                add(*i, *c as i128, &mut acc, &mut touched);
                            }
                        }
                        None => add(k, 1, &mut acc, &mut touched),
                    }
                }
                let bad = touched.iter().any(|&i| acc[i] != 0);
                for &i in &touched {
                    acc[i] = 0;
                }
                touched.clear();
                if bad {
                    witness = Some(format!("basis element {}", m.label(n, j)));
                    break 'orbits;
                }
            }
        }
        out.push(LawReport::new(format!("chain map {op:?}"), n, witness));
    }
    Ok(out)
}

/// `∂_n p^{k,n} = p^{k-1,n-1} ∂_{<=k} + p^{k,n-1} ∂_{>k}` for every `0 <= k <= n`.
pub fn check_mixed_chain_map(ops: &Operators) -> Result<Vec<LawReport>> {
    let m = ops.model();
    let mut out = Vec::new();
    for n in (m.lo() + 1).max(0)..=m.hi() {
        for k in 0..=n {
            let mut witness = None;
            for j in 0..m.dim(n) {
                let e = Chain::basis(n, j);
                let lhs = m.boundary(n, &ops.p_sym(k, &e)?.coeffs)?;
                let mut low = QVec::new();
                let mut high = QVec::new();
                for i in 0..=n {
                    let f = m.act(Letter::Face(i as usize), n, &e.coeffs)?;
                    if i <= k {
                        low = low.add_scaled(&sign(i), &f);
                    } else {
                        high = high.add_scaled(&sign(i), &f);
                    }
                }
                let mut rhs = ops.p_sym((k - 1).max(0), &Chain::new(n - 1, low))?.coeffs;
                if k < n {
                    rhs = rhs.add(&ops.p_sym(k, &Chain::new(n - 1, high))?.coeffs);
                }
                if lhs != rhs {
                    witness = Some(format!("basis element {}", m.label(n, j)));
                    break;
                }
            }
            out.push(LawReport::new(format!("mixed chain map k={k}"), n, witness));
        }
    }
    Ok(out)
}

/// `P² = P` on every degree of the model.
pub fn check_idempotent(
    ops: &Operators,
    group: impl Fn(i32) -> Option<Group>,
) -> Result<Vec<LawReport>> {
    let m = ops.model();
    let mut out = Vec::new();
    for n in m.lo()..=m.hi() {
        let Some(g) = group(n) else { continue };
        let p = ops.projector(g, n)?;
        let witness = p
            .check_idempotent()
            .err()
            .map(|j| format!("basis element {}", m.label(n, j)));
        out.push(LawReport::new(format!("idempotent {g:?}"), n, witness));
    }
    Ok(out)
}

/// `∂h + h∂ = id - P` as full matrices, for every degree `n` with `n + 1`
/// built, where `∂` is the model's boundary times `boundary_sign`.
///
/// The reversal homotopy `h̃` satisfies the identity for the cubical boundary
/// `Σ_i (-1)^i (d_i^0 - d_i^1)`, the negative of the one the model uses, so
/// it is checked with `boundary_sign = -1`.
pub fn check_homotopy(ops: &Operators, h: Op, p: Op, boundary_sign: i64) -> Result<Vec<LawReport>> {
    let m = ops.model();
    let sgn = Scalar::from_int(boundary_sign);
    let mut out = Vec::new();
    for n in m.lo()..m.hi() {
        let hn = ops.matrix(h, n)?;
        let mut lhs = m.differential(n + 1)?.mul(&hn)?;
        if m.contains(n - 1) {
            let h_down = ops.matrix(h, n - 1)?;
            lhs = lhs.add(&h_down.mul(&m.differential(n)?)?)?;
        }
        let lhs = lhs.scale(&sgn);
        let pm = ops.matrix(p, n)?;
        let rhs = ExactMatrix::identity(m.dim(n)).sub(&pm)?;
        let witness = first_difference(&lhs, &rhs);
        out.push(LawReport::new(format!("homotopy {h:?}"), n, witness));
    }
    Ok(out)
}

/// `ker P` equals the span of the given generators: every generator is
/// annihilated and the dimensions agree.
pub fn check_kernel(ops: &Operators, g: Group, n: i32, gens: &[QVec]) -> Result<LawReport> {
    let p = ops.projector(g, n)?;
    for (k, v) in gens.iter().enumerate() {
        if !p.apply(v).is_zero() {
            return Ok(LawReport::new(
                "kernel",
                n,
                Some(format!("generator {k} is not annihilated")),
            ));
        }
    }
    let mut e = FieldEchelon::new();
    for v in gens {
        e.insert(v);
    }
    let rank_p = crate::exact_linalg::rank_q(&p.matrix()?);
    let dim = ops.model().dim(n);
    let witness = (e.rank() + rank_p != dim).then(|| {
        format!(
            "span of generators has dimension {}, kernel has {}",
            e.rank(),
            dim - rank_p
        )
    });
    Ok(LawReport::new("kernel", n, witness))
}

/// `P(g x) = sgn(g) P(x)` for every group element and basis element.
pub fn check_equivariance(ops: &Operators, g: Group, n: i32) -> Result<LawReport> {
    let p = ops.projector(g, n)?;
    for j in 0..ops.model().dim(n) {
        let base = p.column_scaled(j);
        for (k, s) in p.orbit_terms(j) {
            // s already carries sgn(g) times the action's sign
            let img = p.column_scaled(k as usize).scale(&s);
            if img != *base {
                return Ok(LawReport::new(
                    "equivariance",
                    n,
                    Some(format!("basis element {}", ops.model().label(n, j))),
                ));
            }
        }
    }
    Ok(LawReport::new("equivariance", n, None))
}

/// Every operator law that applies to the model's symmetries: chain-map and
/// idempotence laws for each averaging operator and the contracting homotopies.
/// With this crate's cubical boundary the reversal homotopy satisfies
/// `∂h̃ + h̃∂ = p̃ - id`, so it is checked with the opposite sign.
pub fn operator_laws(ops: &Operators) -> Result<Vec<LawReport>> {
    let m = ops.model();
    let mut laws = Vec::new();
    match m.mode() {
        Mode::Simplicial => {
            laws.extend(check_chain_map(ops, Op::PX)?);
            laws.extend(check_mixed_chain_map(ops)?);
            laws.extend(check_idempotent(ops, |n| (n > 0).then_some(Group::Sym(n)))?);
            laws.extend(check_homotopy(ops, Op::H, Op::PX, 1)?);
        }
        Mode::Cubical => {
            let f = m.flags();
            if f.reversals {
                laws.extend(check_chain_map(ops, Op::QX)?);
                laws.extend(check_idempotent(ops, |n| (n > 0).then_some(Group::Rev(n)))?);
                laws.extend(check_homotopy(ops, Op::HRev, Op::QX, -1)?);
            }
            if f.transpositions {
                laws.extend(check_chain_map(ops, Op::PT)?);
                laws.extend(check_idempotent(ops, |n| {
                    (n > 1).then_some(Group::CubePerm)
                })?);
            }
            if f.reversals && f.transpositions {
                laws.extend(check_chain_map(ops, Op::U)?);
                laws.extend(check_idempotent(ops, |n| {
                    (n > 0).then_some(Group::Hyperoct)
                })?);
            }
        }
    }
    Ok(laws)
}

/// The image of an idempotent operator as a sub-complex, together with the
/// degree-wise dimensions of its kernel.
pub struct ImageComplex {
    pub complex: ComplexRep,
    pub bases: Vec<Vec<QVec>>,
    pub kernel_dims: Vec<usize>,
}

pub fn image_complex(ops: &Operators, op: Op) -> Result<ImageComplex> {
    let m = ops.model();
    let mut bases: Vec<SubspaceBasis> = Vec::new();
    let mut kernel_dims = Vec::new();
    for n in m.lo()..=m.hi() {
        let pm = ops.matrix(op, n)?;
        if pm.mul(&pm)? != pm {
            return Err(Error::contract(format!(
                "{op:?} is not idempotent in degree {n}"
            )));
        }
        let mut e = FieldEchelon::new();
        for c in pm.columns() {
            e.insert(c);
        }
        let b = SubspaceBasis::from_echelon(e);
        // the inclusion splits the projection
        for r in b.rows() {
            if &pm.apply(r) != r {
                return Err(Error::contract(format!(
                    "{op:?} does not fix its image in degree {n}"
                )));
            }
        }
        kernel_dims.push(m.dim(n) - b.rank());
        bases.push(b);
    }
    let ambient = m.complex(Ring::Q)?;
    let gens: Vec<Vec<QVec>> = bases.iter().map(|b| b.rows().to_vec()).collect();
    let sub = crate::chain_modules::subspace_subcomplex(&gens, &ambient)?;
    Ok(ImageComplex {
        complex: sub.complex,
        bases: sub.bases,
        kernel_dims,
    })
}
