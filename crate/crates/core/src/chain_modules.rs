//! Presheaves of cells and of free modules, their chain complexes, and the
//! sub-complexes generated by degeneracies, connections and symmetries.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact_linalg::{
    homology_of_pair, ExactMatrix, FieldEchelon, HomologyGroup, IntEchelon, LatticeBasis,
    MatrixJson, Ring, Scalar, SparseVec, SubspaceBasis,
};
use crate::structure_maps::{
    identity_instances, points, Flags, IdentityRecord, Letter, Mode, OpWord,
};

pub type QVec = SparseVec<Scalar>;

/// A finite formal sum of basis elements in one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub degree: i32,
    pub coeffs: QVec,
}

impl Chain {
    pub fn new(degree: i32, coeffs: QVec) -> Self {
        Chain { degree, coeffs }
    }

    pub fn basis(degree: i32, b: usize) -> Self {
        Chain {
            degree,
            coeffs: QVec::unit(b, Scalar::one()),
        }
    }

    pub fn zero(degree: i32) -> Self {
        Chain {
            degree,
            coeffs: QVec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }
}

/// A presheaf of finite sets on the simplex or cube category, truncated to a
/// window of degrees. Cells are indexed `0..num_cells(n)`.
pub trait CellSystem {
    fn mode(&self) -> Mode;
    fn flags(&self) -> Flags;
    fn min_degree(&self) -> i32;
    fn max_degree(&self) -> i32;
    fn num_cells(&self, n: i32) -> usize;
    /// Action of the generator with codomain degree `n` on a cell of degree `n`.
    /// `None` when the generator is unavailable or leaves the degree window.
    fn act(&self, letter: Letter, n: i32, cell: usize) -> Option<usize>;
    fn label(&self, n: i32, cell: usize) -> String;
}

/// A presheaf of free modules with a chosen basis per degree.
pub trait LinearSystem {
    fn mode(&self) -> Mode;
    fn flags(&self) -> Flags;
    fn min_degree(&self) -> i32;
    fn max_degree(&self) -> i32;
    fn dim(&self, n: i32) -> usize;
    fn act(&self, letter: Letter, n: i32, b: usize) -> Option<QVec>;
    fn label(&self, n: i32, b: usize) -> String;
    /// In cubical mode the degenerate part is spanned by the basis elements
    /// flagged here.
    fn is_degenerate(&self, _n: i32, _b: usize) -> bool {
        false
    }
}

fn in_window(lo: i32, hi: i32, n: i32) -> bool {
    (lo..=hi).contains(&n)
}

/// How values of a [`MapSystem`] table are printed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueNames {
    Names(Vec<String>),
    /// values are points of `[1]^m`, printed coordinate by coordinate
    Bits(usize),
}

impl ValueNames {
    fn render(&self, v: u32) -> String {
        match self {
            ValueNames::Names(n) => n[v as usize].clone(),
            ValueNames::Bits(m) => (0..*m)
                .map(|k| if v >> k & 1 == 1 { '1' } else { '0' })
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
struct DegreeCells {
    width: usize,
    data: Vec<u32>,
}

impl DegreeCells {
    fn len(&self) -> usize {
        if self.width == 0 {
            self.data.len()
        } else {
            self.data.len() / self.width
        }
    }

    fn get(&self, k: usize) -> &[u32] {
        &self.data[k * self.width..(k + 1) * self.width]
    }

    fn find(&self, t: &[u32]) -> Option<usize> {
        if self.width == 0 {
            // the single empty table is stored as a marker entry
            return (!self.data.is_empty()).then_some(0);
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(t) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// Cells given as maps out of the representing objects: a cell of degree `n`
/// is a table over the points of `[n]` or `[1]^n`, acted on by precomposition.
/// Tables may be identified up to postcomposition with a finite group of value
/// permutations; the lexicographically least table represents each class.
#[derive(Clone, Debug)]
pub struct MapSystem {
    mode: Mode,
    flags: Flags,
    lo: i32,
    names: ValueNames,
    aut: Vec<Vec<u32>>,
    cells: Vec<DegreeCells>,
    actions: Vec<Vec<(Letter, Vec<u32>)>>,
}

impl MapSystem {
    /// Builds the system from raw tables per degree `lo, lo+1, …`. Fails when
    /// the tables are not closed under the available generators or when the
    /// action depends on the chosen representative.
    pub fn new(
        mode: Mode,
        flags: Flags,
        lo: i32,
        names: ValueNames,
        aut: Vec<Vec<u32>>,
        tables: Vec<Vec<Vec<u32>>>,
    ) -> Result<Self> {
        let mut sys = MapSystem {
            mode,
            flags,
            lo,
            names,
            aut,
            cells: Vec::new(),
            actions: Vec::new(),
        };
        for (k, ts) in tables.into_iter().enumerate() {
            let n = lo + k as i32;
            let width = points(mode, n);
            let mut canon: Vec<Vec<u32>> = ts.iter().map(|t| sys.canonical(t)).collect();
            if let Some(t) = canon.iter().find(|t| t.len() != width) {
                return Err(Error::invalid(format!(
                    "cell of degree {n} has {} entries, expected {width}",
                    t.len()
                )));
            }
            canon.sort();
            canon.dedup();
            let data = if width == 0 {
                vec![0; canon.len().min(1)]
            } else {
                canon.concat()
            };
            sys.cells.push(DegreeCells { width, data });
        }
        sys.build_actions()?;
        Ok(sys)
    }

    fn hi(&self) -> i32 {
        self.lo + self.cells.len() as i32 - 1
    }

    fn canonical(&self, t: &[u32]) -> Vec<u32> {
        let mut best = t.to_vec();
        for a in &self.aut {
            let c: Vec<u32> = t.iter().map(|&v| a[v as usize]).collect();
            if c < best {
                best = c;
            }
        }
        best
    }

    /// The table representing cell `k` of degree `n`.
    pub fn table(&self, n: i32, k: usize) -> &[u32] {
        let d = &self.cells[(n - self.lo) as usize];
        if d.width == 0 {
            &[]
        } else {
            d.get(k)
        }
    }

    /// Index of the class of an arbitrary table.
    pub fn find(&self, n: i32, t: &[u32]) -> Option<usize> {
        if !in_window(self.lo, self.hi(), n) {
            return None;
        }
        self.cells[(n - self.lo) as usize].find(&self.canonical(t))
    }

    fn letters_into(&self, n: i32) -> Vec<Letter> {
        let nu = n.max(0) as usize;
        let mut out = Vec::new();
        match self.mode {
            Mode::Simplicial => {
                if n >= 0 {
                    out.extend((0..=nu).map(Letter::Face));
                    out.extend((0..=nu).map(Letter::Degeneracy));
                }
                if self.flags.transpositions {
                    out.extend((0..nu).map(Letter::Transposition));
                }
            }
            Mode::Cubical => {
                for i in 1..=nu {
                    out.push(Letter::CubeFace(i, 0));
                    out.push(Letter::CubeFace(i, 1));
                    out.push(Letter::Connection(i, 0));
                    out.push(Letter::Connection(i, 1));
                }
                out.extend((1..=nu + 1).map(Letter::Degeneracy));
                if self.flags.transpositions {
                    out.extend((1..nu).map(Letter::Transposition));
                }
                if self.flags.reversals {
                    out.extend((1..=nu).map(Letter::Reversal));
                }
            }
        }
        out
    }

    fn build_actions(&mut self) -> Result<()> {
        let (lo, hi) = (self.lo, self.hi());
        let mut all = Vec::new();
        for n in lo..=hi {
            let mut per = Vec::new();
            for l in self.letters_into(n) {
                let Some(dom) = l.domain(self.mode, n) else {
                    continue;
                };
                if !in_window(lo, hi, dom) {
                    continue;
                }
                let g = crate::structure_maps::generator_fn(self.mode, l, n)?;
                let count = self.cells[(n - lo) as usize].len();
                let mut tab = Vec::with_capacity(count);
                for k in 0..count {
                    let x = self.table(n, k).to_vec();
                    let img = self.precompose(&x, g.table());
                    let Some(j) = self.find(dom, &img) else {
                        return Err(Error::contract(format!(
                            "{l} sends cell {} of degree {n} outside the cells of degree {dom}",
                            self.render(&x)
                        )));
                    };
                    for a in &self.aut {
                        let other: Vec<u32> = x.iter().map(|&v| a[v as usize]).collect();
                        if self.find(dom, &self.precompose(&other, g.table())) != Some(j) {
                            return Err(Error::contract(format!(
                                "{l} on degree {n} depends on the representative of {}",
                                self.render(&x)
                            )));
                        }
                    }
                    tab.push(j as u32);
                }
                per.push((l, tab));
            }
            all.push(per);
        }
        self.actions = all;
        Ok(())
    }

    fn precompose(&self, x: &[u32], g: &[u32]) -> Vec<u32> {
        g.iter().map(|&p| x[p as usize]).collect()
    }

    fn render(&self, t: &[u32]) -> String {
        let parts: Vec<String> = t.iter().map(|&v| self.names.render(v)).collect();
        match self.mode {
            Mode::Simplicial => format!("({})", parts.join(",")),
            Mode::Cubical => format!("[{}]", parts.join(",")),
        }
    }
}

impl CellSystem for MapSystem {
    fn mode(&self) -> Mode {
        self.mode
    }

    fn flags(&self) -> Flags {
        self.flags
    }

    fn min_degree(&self) -> i32 {
        self.lo
    }

    fn max_degree(&self) -> i32 {
        self.hi()
    }

    fn num_cells(&self, n: i32) -> usize {
        if in_window(self.lo, self.hi(), n) {
            self.cells[(n - self.lo) as usize].len()
        } else {
            0
        }
    }

    fn act(&self, letter: Letter, n: i32, cell: usize) -> Option<usize> {
        if !in_window(self.lo, self.hi(), n) {
            return None;
        }
        self.actions[(n - self.lo) as usize]
            .iter()
            .find(|(l, _)| *l == letter)
            .map(|(_, t)| t[cell] as usize)
    }

    fn label(&self, n: i32, cell: usize) -> String {
        self.render(self.table(n, cell))
    }
}

/// Applies a word to a cell, leftmost letter first.
pub fn act_word_on_cell(sys: &dyn CellSystem, w: &OpWord, cell: usize) -> Option<usize> {
    let mut n = w.target;
    let mut c = cell;
    for l in &w.letters {
        c = sys.act(*l, n, c)?;
        n = l.domain(sys.mode(), n)?;
    }
    Some(c)
}

/// Applies a word to a chain of a linear system, leftmost letter first.
pub fn act_word_on_chain(sys: &dyn LinearSystem, w: &OpWord, v: &QVec) -> Option<QVec> {
    let mut n = w.target;
    let mut cur = v.clone();
    for l in &w.letters {
        let mut next = QVec::new();
        for (b, c) in cur.iter() {
            next = next.add_scaled(c, &sys.act(*l, n, *b)?);
        }
        cur = next;
        n = l.domain(sys.mode(), n)?;
    }
    Some(cur)
}

/// Outcome of checking the relations on the cells or basis of a system.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemIdentityReport {
    pub instances: usize,
    pub evaluations: usize,
    pub failures: Vec<IdentityRecord>,
}

impl SystemIdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn relevant_instances(
    mode: Mode,
    flags: Flags,
    lo: i32,
    hi: i32,
) -> Vec<crate::structure_maps::IdentityInstance> {
    identity_instances(mode, hi)
        .into_iter()
        .filter(|inst| {
            let ok_letters = inst
                .lhs
                .letters
                .iter()
                .chain(&inst.rhs.letters)
                .all(|l| l.allowed(flags));
            let degs = inst
                .lhs
                .degrees()
                .into_iter()
                .chain(inst.rhs.degrees())
                .flatten();
            ok_letters && degs.into_iter().all(|d| in_window(lo, hi, d))
        })
        .collect()
}

fn sample_indices(count: usize, sample: Option<usize>) -> Vec<usize> {
    match sample {
        Some(s) if s < count && s > 0 => (0..s).map(|k| k * count / s).collect(),
        _ => (0..count).collect(),
    }
}

fn failure(
    mode: Mode,
    inst: &crate::structure_maps::IdentityInstance,
    witness: String,
) -> IdentityRecord {
    IdentityRecord {
        mode,
        identity: inst.name.to_string(),
        case: inst.case.to_string(),
        degree: inst.degree,
        indices: inst
            .indices
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
        lhs: inst.lhs.to_string(),
        rhs: inst.rhs.to_string(),
        pass: false,
        witness: Some(witness),
    }
}

/// Checks every relation on every cell (or on `sample` evenly spaced cells
/// per degree).
pub fn check_identities_on_cells(
    sys: &dyn CellSystem,
    sample: Option<usize>,
) -> SystemIdentityReport {
    let (lo, hi) = (sys.min_degree(), sys.max_degree());
    let mut rep = SystemIdentityReport::default();
    for inst in relevant_instances(sys.mode(), sys.flags(), lo, hi) {
        rep.instances += 1;
        for c in sample_indices(sys.num_cells(inst.degree), sample) {
            rep.evaluations += 1;
            let l = act_word_on_cell(sys, &inst.lhs, c);
            let r = act_word_on_cell(sys, &inst.rhs, c);
            if l != r || l.is_none() {
                let lbl = sys.label(inst.degree, c);
                rep.failures.push(failure(
                    sys.mode(),
                    &inst,
                    format!("cell {lbl}: {l:?} vs {r:?}"),
                ));
                break;
            }
        }
    }
    rep
}

/// Checks every relation on every basis element (or a sample per degree).
pub fn check_identities_on_basis(
    sys: &dyn LinearSystem,
    sample: Option<usize>,
) -> SystemIdentityReport {
    let (lo, hi) = (sys.min_degree(), sys.max_degree());
    let mut rep = SystemIdentityReport::default();
    for inst in relevant_instances(sys.mode(), sys.flags(), lo, hi) {
        rep.instances += 1;
        for b in sample_indices(sys.dim(inst.degree), sample) {
            rep.evaluations += 1;
            let v = QVec::unit(b, Scalar::one());
            let l = act_word_on_chain(sys, &inst.lhs, &v);
            let r = act_word_on_chain(sys, &inst.rhs, &v);
            if l != r || l.is_none() {
                let lbl = sys.label(inst.degree, b);
                rep.failures.push(failure(
                    sys.mode(),
                    &inst,
                    format!("basis {lbl}: {l:?} vs {r:?}"),
                ));
                break;
            }
        }
    }
    rep
}

/// The free module on a cell system.
pub struct FreeLinear<'a> {
    sys: &'a dyn CellSystem,
    degenerate: Vec<Vec<bool>>,
}

/// Lifts a cell system to modules; basis = cells. In cubical mode a cell is
/// flagged degenerate when it lies in the image of some `s_i`.
pub fn free_linear(sys: &dyn CellSystem) -> FreeLinear<'_> {
    let (lo, hi) = (sys.min_degree(), sys.max_degree());
    let mut degenerate = Vec::new();
    for n in lo..=hi {
        let mut flags = vec![false; sys.num_cells(n)];
        if sys.mode() == Mode::Cubical && n > lo {
            for c in 0..sys.num_cells(n - 1) {
                for i in 1..=n as usize {
                    if let Some(d) = sys.act(Letter::Degeneracy(i), n - 1, c) {
                        flags[d] = true;
                    }
                }
            }
        }
        degenerate.push(flags);
    }
    FreeLinear { sys, degenerate }
}

impl FreeLinear<'_> {
    pub fn cells(&self) -> &dyn CellSystem {
        self.sys
    }
}

impl LinearSystem for FreeLinear<'_> {
    fn mode(&self) -> Mode {
        self.sys.mode()
    }

    fn flags(&self) -> Flags {
        self.sys.flags()
    }

    fn min_degree(&self) -> i32 {
        self.sys.min_degree()
    }

    fn max_degree(&self) -> i32 {
        self.sys.max_degree()
    }

    fn dim(&self, n: i32) -> usize {
        self.sys.num_cells(n)
    }

    fn act(&self, letter: Letter, n: i32, b: usize) -> Option<QVec> {
        self.sys
            .act(letter, n, b)
            .map(|c| QVec::unit(c, Scalar::one()))
    }

    fn label(&self, n: i32, b: usize) -> String {
        self.sys.label(n, b)
    }

    fn is_degenerate(&self, n: i32, b: usize) -> bool {
        self.degenerate
            .get((n - self.sys.min_degree()) as usize)
            .is_some_and(|f| f[b])
    }
}

const NONE: u32 = u32::MAX;

/// The chain groups of a linear system: every basis element in simplicial
/// mode, the non-degenerate ones in cubical mode.
pub struct ChainModel<'a> {
    sys: &'a dyn LinearSystem,
    lo: i32,
    hi: i32,
    basis: Vec<Vec<usize>>,
    index: Vec<Vec<u32>>,
}

impl<'a> ChainModel<'a> {
    pub fn new(sys: &'a dyn LinearSystem) -> Self {
        Self::truncated(sys, sys.max_degree())
    }

    pub fn truncated(sys: &'a dyn LinearSystem, max_degree: i32) -> Self {
        let lo = sys.min_degree();
        let hi = max_degree.min(sys.max_degree());
        let mut basis = Vec::new();
        let mut index = Vec::new();
        for n in lo..=hi {
            let mut idx = vec![NONE; sys.dim(n)];
            let mut b = Vec::new();
            for (k, slot) in idx.iter_mut().enumerate() {
                if sys.mode() == Mode::Simplicial || !sys.is_degenerate(n, k) {
                    *slot = b.len() as u32;
                    b.push(k);
                }
            }
            basis.push(b);
            index.push(idx);
        }
        ChainModel {
            sys,
            lo,
            hi,
            basis,
            index,
        }
    }

    pub fn system(&self) -> &'a dyn LinearSystem {
        self.sys
    }

    pub fn mode(&self) -> Mode {
        self.sys.mode()
    }

    pub fn flags(&self) -> Flags {
        self.sys.flags()
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.hi
    }

    pub fn contains(&self, n: i32) -> bool {
        in_window(self.lo, self.hi, n)
    }

    pub fn dim(&self, n: i32) -> usize {
        if self.contains(n) {
            self.basis[(n - self.lo) as usize].len()
        } else {
            0
        }
    }

    /// System basis index of chain-group basis element `j`.
    pub fn lift(&self, n: i32, j: usize) -> usize {
        self.basis[(n - self.lo) as usize][j]
    }

    pub fn label(&self, n: i32, j: usize) -> String {
        self.sys.label(n, self.lift(n, j))
    }

    /// Drops degenerate terms and renumbers a system chain.
    pub fn project(&self, n: i32, v: &QVec) -> QVec {
        let idx = &self.index[(n - self.lo) as usize];
        // the renumbering is monotone, so sorted input stays sorted
        QVec::from_sorted(
            v.iter()
                .filter(|(b, _)| idx[*b] != NONE)
                .map(|(b, c)| (idx[*b] as usize, c.clone()))
                .collect(),
        )
    }

    /// A generator applied to a chain of the chain group of degree `n`.
    pub fn act(&self, letter: Letter, n: i32, v: &QVec) -> Result<QVec> {
        let dom = letter
            .domain(self.mode(), n)
            .filter(|d| self.contains(*d) && self.contains(n))
            .ok_or_else(|| {
                Error::invalid(format!("{letter} on degree {n} leaves the built degrees"))
            })?;
        let mut acc = QVec::new();
        for (j, c) in v.iter() {
            let img = self.sys.act(letter, n, self.lift(n, *j)).ok_or_else(|| {
                Error::invalid(format!("{letter} is not available on degree {n}"))
            })?;
            acc = acc.add_scaled(c, &img);
        }
        Ok(self.project(dom, &acc))
    }

    /// The system-level faces making up the boundary, as (letter, sign).
    pub fn boundary_terms(&self, n: i32) -> Vec<(Letter, i64)> {
        match self.mode() {
            Mode::Simplicial if n >= 0 => (0..=n as usize)
                .map(|i| (Letter::Face(i), if i % 2 == 0 { 1 } else { -1 }))
                .collect(),
            Mode::Cubical => (1..=n.max(0) as usize)
                .flat_map(|i| {
                    let s = if i % 2 == 1 { 1 } else { -1 };
                    [(Letter::CubeFace(i, 0), s), (Letter::CubeFace(i, 1), -s)]
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn boundary(&self, n: i32, v: &QVec) -> Result<QVec> {
        if !self.contains(n - 1) {
            return Ok(QVec::new());
        }
        let mut acc = QVec::new();
        for (j, c) in v.iter() {
            let b = self.lift(n, *j);
            for (l, s) in self.boundary_terms(n) {
                let img = self
                    .sys
                    .act(l, n, b)
                    .ok_or_else(|| Error::invalid(format!("{l} is not available on degree {n}")))?;
                acc = acc.add_scaled(&(c * &Scalar::from_int(s)), &img);
            }
        }
        Ok(self.project(n - 1, &acc))
    }

    /// `∂_n` as a matrix from degree `n` to degree `n - 1`.
    pub fn differential(&self, n: i32) -> Result<ExactMatrix> {
        let cols = (0..self.dim(n))
            .map(|j| self.boundary(n, &QVec::unit(j, Scalar::one())))
            .collect::<Result<Vec<_>>>()?;
        ExactMatrix::from_columns(self.dim(n - 1), cols)
    }

    /// The whole complex over the given ring.
    pub fn complex(&self, ring: Ring) -> Result<ComplexRep> {
        let mut labels = Vec::new();
        let mut diffs = Vec::new();
        for n in self.lo..=self.hi {
            labels.push((0..self.dim(n)).map(|j| self.label(n, j)).collect());
            diffs.push(self.differential(n)?);
        }
        ComplexRep::new(ring, self.lo, labels, diffs)
    }

    /// For a symmetry generator acting on degree `n`, the image of every basis
    /// element as (index, sign). Fails unless the action is monomial.
    pub fn signed_permutation(&self, letter: Letter, n: i32) -> Result<Vec<(u32, i8)>> {
        (0..self.dim(n))
            .map(|j| {
                let v = self.act(letter, n, &QVec::unit(j, Scalar::one()))?;
                match v.entries() {
                    [(k, c)] if c.is_one() => Ok((*k as u32, 1)),
                    [(k, c)] if (-c).is_one() => Ok((*k as u32, -1)),
                    _ => Err(Error::unsupported(format!(
                        "{letter} does not act on degree {n} by a signed permutation of the basis"
                    ))),
                }
            })
            .collect()
    }
}

/// Checks the relations on the system and assembles its chain complex.
fn assemble(sys: &dyn LinearSystem, max_deg: i32, ring: Ring, mode: Mode) -> Result<ComplexRep> {
    if sys.mode() != mode {
        return Err(Error::invalid(format!("expected a {mode:?} system")));
    }
    let rep = check_identities_on_basis(sys, Some(8));
    if let Some(f) = rep.failures.first() {
        return Err(Error::contract(format!(
            "relation {} ({}) fails in degree {}: {}",
            f.identity,
            f.case,
            f.degree,
            f.witness.as_deref().unwrap_or("")
        )));
    }
    ChainModel::truncated(sys, max_deg).complex(ring)
}

/// Alternating face map complex, augmented by degree -1 when present.
pub fn simplicial_complex_of(
    sys: &dyn LinearSystem,
    max_deg: i32,
    ring: Ring,
) -> Result<ComplexRep> {
    assemble(sys, max_deg, ring, Mode::Simplicial)
}

/// Cubical complex: degenerate cubes divided out, `∂ = Σ (-1)^{i-1}(d_i^0 - d_i^1)`.
pub fn cubical_complex_of(sys: &dyn LinearSystem, max_deg: i32, ring: Ring) -> Result<ComplexRep> {
    assemble(sys, max_deg, ring, Mode::Cubical)
}

/// A bounded chain complex of free modules with explicit bases.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexRep {
    ring: Ring,
    lo: i32,
    labels: Vec<Vec<String>>,
    diffs: Vec<ExactMatrix>,
}

/// Serialized form of a [`ComplexRep`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub ring: Ring,
    pub degrees: Vec<DegreeJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeJson {
    pub n: i32,
    pub basis: Vec<String>,
    pub differential: MatrixJson,
}

impl ComplexRep {
    /// `diffs[k]` is the differential out of degree `lo + k`.
    pub fn new(
        ring: Ring,
        lo: i32,
        labels: Vec<Vec<String>>,
        diffs: Vec<ExactMatrix>,
    ) -> Result<Self> {
        if labels.len() != diffs.len() {
            return Err(Error::invalid("one differential per degree is required"));
        }
        for (k, d) in diffs.iter().enumerate() {
            let n = lo + k as i32;
            let below = if k == 0 { 0 } else { labels[k - 1].len() };
            if d.cols() != labels[k].len() || d.rows() != below {
                return Err(Error::invalid(format!(
                    "differential of degree {n} is {}x{}, expected {below}x{}",
                    d.rows(),
                    d.cols(),
                    labels[k].len()
                )));
            }
            if ring == Ring::Z && !d.is_integer() {
                return Err(Error::invalid(format!(
                    "differential of degree {n} is not integral"
                )));
            }
            if k > 0 {
                let prev = &diffs[k - 1];
                for (j, c) in d.columns().iter().enumerate() {
                    if !prev.apply(c).is_zero() {
                        return Err(Error::contract(format!(
                            "boundary of boundary is nonzero on basis element {} of degree {n}",
                            labels[k][j]
                        )));
                    }
                }
            }
        }
        Ok(ComplexRep {
            ring,
            lo,
            labels,
            diffs,
        })
    }

    pub fn zero(ring: Ring, lo: i32, hi: i32) -> Self {
        let k = (hi - lo + 1).max(0) as usize;
        ComplexRep {
            ring,
            lo,
            labels: vec![Vec::new(); k],
            diffs: vec![ExactMatrix::zero(0, 0); k],
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.labels.len() as i32 - 1
    }

    pub fn contains(&self, n: i32) -> bool {
        in_window(self.lo, self.hi(), n)
    }

    pub fn dim(&self, n: i32) -> usize {
        if self.contains(n) {
            self.labels[(n - self.lo) as usize].len()
        } else {
            0
        }
    }

    pub fn dims(&self) -> Vec<(i32, usize)> {
        (self.lo..=self.hi()).map(|n| (n, self.dim(n))).collect()
    }

    pub fn labels(&self, n: i32) -> &[String] {
        &self.labels[(n - self.lo) as usize]
    }

    /// `∂_n`; zero with the right shape outside the stored window's interior.
    pub fn differential(&self, n: i32) -> ExactMatrix {
        if self.contains(n) {
            self.diffs[(n - self.lo) as usize].clone()
        } else {
            ExactMatrix::zero(self.dim(n - 1), self.dim(n))
        }
    }

    pub fn with_ring(&self, ring: Ring) -> Result<ComplexRep> {
        ComplexRep::new(ring, self.lo, self.labels.clone(), self.diffs.clone())
    }

    /// Homology in every degree below the top one (the top degree has no
    /// incoming differential).
    pub fn homology(&self) -> Result<Vec<(i32, HomologyGroup)>> {
        (self.lo..self.hi())
            .map(|n| {
                let d_out = self.differential(n);
                let d_in = self.differential(n + 1);
                Ok((n, homology_of_pair(&d_out, &d_in, self.ring)?))
            })
            .collect()
    }

    pub fn homology_at(&self, n: i32) -> Result<HomologyGroup> {
        if n >= self.hi() || n < self.lo {
            return Err(Error::invalid(format!(
                "homology in degree {n} needs degrees {n} and {} to be built",
                n + 1
            )));
        }
        homology_of_pair(&self.differential(n), &self.differential(n + 1), self.ring)
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            ring: self.ring,
            degrees: (self.lo..=self.hi())
                .map(|n| DegreeJson {
                    n,
                    basis: self.labels(n).to_vec(),
                    differential: MatrixJson::from(&self.diffs[(n - self.lo) as usize]),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &ComplexJson) -> Result<Self> {
        let Some(first) = j.degrees.first() else {
            return Ok(ComplexRep::zero(j.ring, 0, -1));
        };
        for (k, d) in j.degrees.iter().enumerate() {
            if d.n != first.n + k as i32 {
                return Err(Error::invalid(format!("degree {} is out of sequence", d.n)));
            }
        }
        let labels = j.degrees.iter().map(|d| d.basis.clone()).collect();
        let diffs = j
            .degrees
            .iter()
            .map(|d| ExactMatrix::try_from(&d.differential))
            .collect::<Result<Vec<_>>>()?;
        ComplexRep::new(j.ring, first.n, labels, diffs)
    }
}

/// Named sub-complexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubcomplexKind {
    Deg,
    SDeg,
    DegPlusSDeg,
    Con,
    PosCon,
    TCon,
    RCon,
    RtCon,
}

impl fmt::Display for SubcomplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubcomplexKind::Deg => "deg",
            SubcomplexKind::SDeg => "sdeg",
            SubcomplexKind::DegPlusSDeg => "deg+sdeg",
            SubcomplexKind::Con => "con",
            SubcomplexKind::PosCon => "poscon",
            SubcomplexKind::TCon => "tcon",
            SubcomplexKind::RCon => "rcon",
            SubcomplexKind::RtCon => "rtcon",
        })
    }
}

impl SubcomplexKind {
    pub fn check(&self, mode: Mode, flags: Flags) -> Result<()> {
        use SubcomplexKind::*;
        let (want, ok) = match self {
            Deg => ("a simplicial system", mode == Mode::Simplicial),
            SDeg | DegPlusSDeg => (
                "a simplicial system with transpositions",
                mode == Mode::Simplicial && flags.transpositions,
            ),
            Con | PosCon => ("a cubical system", mode == Mode::Cubical),
            TCon => (
                "a cubical system with transpositions",
                mode == Mode::Cubical && flags.transpositions,
            ),
            RCon => (
                "a cubical system with reversals",
                mode == Mode::Cubical && flags.reversals,
            ),
            RtCon => (
                "a cubical system with transpositions and reversals",
                mode == Mode::Cubical && flags.transpositions && flags.reversals,
            ),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "sub-complex {self} needs {want}; the input is a {} system with symmetries {flags}",
                format!("{mode:?}").to_lowercase()
            )))
        }
    }

    /// Simple symmetry generators whose `x + g x` span the sub-complex in degree `n`.
    pub fn symmetry_letters(&self, n: i32) -> Vec<Letter> {
        use SubcomplexKind::*;
        let nu = n.max(0) as usize;
        let t_simp = || (0..nu).map(Letter::Transposition).collect::<Vec<_>>();
        let t_cube = || (1..nu).map(Letter::Transposition).collect::<Vec<_>>();
        let r_cube = || (1..=nu).map(Letter::Reversal).collect::<Vec<_>>();
        match self {
            SDeg | DegPlusSDeg if n >= 0 => t_simp(),
            TCon => t_cube(),
            RCon => r_cube(),
            RtCon => [t_cube(), r_cube()].concat(),
            _ => Vec::new(),
        }
    }
}

/// Generators of the sub-complex in degree `n`, in chain-group coordinates.
pub fn subcomplex_generators(
    kind: SubcomplexKind,
    model: &ChainModel,
    n: i32,
) -> Result<Vec<QVec>> {
    use SubcomplexKind::*;
    kind.check(model.mode(), model.flags())?;
    let mut out = Vec::new();
    if !model.contains(n) {
        return Ok(out);
    }
    // degeneracies and connections start from degree 0
    let below = n >= 1 && model.contains(n - 1);
    let images = |letters: Vec<Letter>, out: &mut Vec<QVec>| -> Result<()> {
        for j in 0..model.dim(n - 1) {
            for &l in &letters {
                out.push(model.act(l, n - 1, &QVec::unit(j, Scalar::one()))?);
            }
        }
        Ok(())
    };
    let m = (n - 1).max(0) as usize;
    if below && matches!(kind, Deg | DegPlusSDeg) {
        images((0..=m).map(Letter::Degeneracy).collect(), &mut out)?;
    }
    if below && matches!(kind, Con | PosCon) {
        let mut ls: Vec<Letter> = (1..=m).map(|i| Letter::Connection(i, 0)).collect();
        if kind == Con {
            ls.extend((1..=m).map(|i| Letter::Connection(i, 1)));
        }
        images(ls, &mut out)?;
    }
    for l in kind.symmetry_letters(n) {
        for j in 0..model.dim(n) {
            let b = QVec::unit(j, Scalar::one());
            // sgn of every simple generator is -1
            out.push(b.add(&model.act(l, n, &b)?));
        }
    }
    out.retain(|v| !v.is_zero());
    Ok(out)
}

/// All generators of a kind, one list per degree of the model.
pub fn all_generators(kind: SubcomplexKind, model: &ChainModel) -> Result<Vec<Vec<QVec>>> {
    (model.lo()..=model.hi())
        .map(|n| subcomplex_generators(kind, model, n))
        .collect()
}

fn to_int(v: &QVec) -> Result<SparseVec<BigInt>> {
    let mut out = Vec::with_capacity(v.nnz());
    for (i, c) in v.iter() {
        out.push((
            *i,
            c.to_bigint()
                .ok_or_else(|| Error::invalid("lattice generators must be integral"))?,
        ));
    }
    Ok(SparseVec::from_sorted(out))
}

fn to_q(v: &SparseVec<BigInt>) -> QVec {
    v.map(|x| Scalar::from_bigint(x.clone()))
}

/// A sub-complex presented by a lattice basis (over Z) or a subspace basis
/// (over Q) in every degree, with the induced differential.
#[derive(Clone, Debug)]
pub struct Subcomplex {
    pub complex: ComplexRep,
    /// basis vectors in ambient coordinates, per degree
    pub bases: Vec<Vec<QVec>>,
}

impl Subcomplex {
    pub fn rank(&self, n: i32) -> usize {
        self.complex.dim(n)
    }

    pub fn basis(&self, n: i32) -> &[QVec] {
        &self.bases[(n - self.complex.lo()) as usize]
    }
}

/// The sub-complex of an integral ambient complex generated over Z by the
/// given chains; `gens[k]` lives in degree `ambient.lo() + k`.
pub fn lattice_subcomplex(gens: &[Vec<QVec>], ambient: &ComplexRep) -> Result<Subcomplex> {
    if ambient.ring() != Ring::Z {
        return Err(Error::invalid(
            "lattice sub-complexes need an integer ambient complex",
        ));
    }
    let bases: Vec<LatticeBasis> = gens
        .iter()
        .map(|gs| {
            let mut e = IntEchelon::new();
            for g in gs {
                e.insert(&to_int(g)?);
            }
            Ok(e.into_basis())
        })
        .collect::<Result<_>>()?;
    induced(
        ambient,
        Ring::Z,
        bases
            .iter()
            .map(|b| b.rows().iter().map(to_q).collect())
            .collect(),
        |k, v| bases[k].coordinates(&to_int(v).ok()?).map(|c| to_q(&c)),
    )
}

/// The sub-complex generated over Q.
pub fn subspace_subcomplex(gens: &[Vec<QVec>], ambient: &ComplexRep) -> Result<Subcomplex> {
    let bases: Vec<SubspaceBasis> = gens
        .iter()
        .map(|gs| {
            let mut e = FieldEchelon::new();
            for g in gs {
                e.insert(g);
            }
            SubspaceBasis::from_echelon(e)
        })
        .collect();
    induced(
        ambient,
        Ring::Q,
        bases.iter().map(|b| b.rows().to_vec()).collect(),
        |k, v| bases[k].coordinates(v),
    )
}

fn induced(
    ambient: &ComplexRep,
    ring: Ring,
    bases: Vec<Vec<QVec>>,
    coords: impl Fn(usize, &QVec) -> Option<QVec>,
) -> Result<Subcomplex> {
    let lo = ambient.lo();
    if bases.len() != ambient.labels.len() {
        return Err(Error::invalid(format!(
            "expected generators for {} degrees, got {}",
            ambient.labels.len(),
            bases.len()
        )));
    }
    let mut labels = Vec::new();
    let mut diffs = Vec::new();
    for (k, rows) in bases.iter().enumerate() {
        let n = lo + k as i32;
        let d = ambient.differential(n);
        let mut cols = Vec::new();
        for (j, r) in rows.iter().enumerate() {
            let img = d.apply(r);
            if k == 0 {
                if !img.is_zero() {
                    return Err(Error::contract(format!(
                        "degree {n} generator {j} has nonzero boundary"
                    )));
                }
                cols.push(QVec::new());
                continue;
            }
            let c = coords(k - 1, &img).ok_or_else(|| {
                Error::contract(format!(
                    "not a sub-complex: the boundary of basis vector {j} in degree {n} leaves the span in degree {}",
                    n - 1
                ))
            })?;
            cols.push(c);
        }
        let below = if k == 0 { 0 } else { bases[k - 1].len() };
        labels.push((0..rows.len()).map(|j| format!("{n}:{j}")).collect());
        diffs.push(ExactMatrix::from_columns(below, cols)?);
    }
    Ok(Subcomplex {
        complex: ComplexRep::new(ring, lo, labels, diffs)?,
        bases,
    })
}

/// `C / S`, with basis the standard vectors outside the pivots of `S`. Over Z
/// only coordinate sub-complexes (every generator `±e_j`) are accepted, since
/// then the quotient is free on the remaining coordinates.
pub fn quotient_complex(c: &ComplexRep, gens: &[Vec<QVec>]) -> Result<ComplexRep> {
    let unit = |v: &QVec| matches!(v.entries(), [(_, x)] if x.abs().is_one());
    if c.ring() != Ring::Q && !gens.iter().flatten().all(unit) {
        return Err(Error::unsupported(
            "quotients over Z are only formed by coordinate sub-complexes; use a lattice sub-complex",
        ));
    }
    let lo = c.lo();
    if gens.len() != c.labels.len() {
        return Err(Error::invalid(format!(
            "expected generators for {} degrees, got {}",
            c.labels.len(),
            gens.len()
        )));
    }
    let echelons: Vec<FieldEchelon> = gens
        .iter()
        .map(|gs| {
            let mut e = FieldEchelon::new();
            for g in gs {
                e.insert(g);
            }
            e
        })
        .collect();
    let keep: Vec<Vec<usize>> = echelons
        .iter()
        .enumerate()
        .map(|(k, e)| {
            (0..c.dim(lo + k as i32))
                .filter(|j| !e.is_pivot(*j))
                .collect()
        })
        .collect();
    let mut labels = Vec::new();
    let mut diffs = Vec::new();
    for (k, kept) in keep.iter().enumerate() {
        let n = lo + k as i32;
        let d = c.differential(n);
        let below = if k == 0 { 0 } else { keep[k - 1].len() };
        let mut cols = Vec::new();
        for &j in kept {
            if k == 0 {
                cols.push(QVec::new());
                continue;
            }
            let (r, _) = echelons[k - 1].reduce(d.column(j));
            let pos = &keep[k - 1];
            cols.push(QVec::from_sorted(
                r.iter()
                    .map(|(i, x)| {
                        let p = pos.binary_search(i).map_err(|_| {
                            Error::contract(format!(
                                "not a sub-complex: reduction in degree {} failed",
                                n - 1
                            ))
                        })?;
                        Ok((p, x.clone()))
                    })
                    .collect::<Result<Vec<_>>>()?,
            ));
        }
        labels.push(kept.iter().map(|&j| c.labels(n)[j].clone()).collect());
        diffs.push(ExactMatrix::from_columns(below, cols)?);
    }
    ComplexRep::new(c.ring(), lo, labels, diffs)
}

/// Dimensions of the span of the generators, per degree, over Q.
pub fn span_dims(gens: &[Vec<QVec>]) -> Vec<usize> {
    gens.iter()
        .map(|gs| {
            let mut e = FieldEchelon::new();
            for g in gs {
                e.insert(g);
            }
            e.rank()
        })
        .collect()
}

/// Distinct cells reachable from `cell` under the listed symmetry letters.
pub fn orbit(sys: &dyn CellSystem, n: i32, cell: usize, letters: &[Letter]) -> Vec<usize> {
    let mut seen = HashSet::from([cell]);
    let mut stack = vec![cell];
    while let Some(c) = stack.pop() {
        for l in letters {
            if let Some(d) = sys.act(*l, n, c) {
                if seen.insert(d) {
                    stack.push(d);
                }
            }
        }
    }
    let mut v: Vec<usize> = seen.into_iter().collect();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{counterexample_x, n1_graph, or_a, sym_a, FacetComplex, SimpleGraph};
    use crate::projections::{Group, Projector};
    use proptest::prelude::*;

    fn edge() -> FacetComplex {
        FacetComplex::new(vec!["1".into(), "2".into()], vec![vec![0, 1]]).unwrap()
    }

    fn cell(m: &ChainModel, n: i32, label: &str) -> usize {
        (0..m.dim(n)).find(|&j| m.label(n, j) == label).unwrap()
    }

    fn lin(m: &ChainModel, n: i32, terms: &[(&str, i64)]) -> QVec {
        QVec::from_pairs(
            terms
                .iter()
                .map(|(l, c)| (cell(m, n, l), Scalar::from_int(*c))),
        )
    }

    #[test]
    fn simplicial_boundaries() {
        let sys = sym_a(&edge(), 3, 1000).unwrap();
        let f = free_linear(&sys);
        let m = ChainModel::new(&f);
        let b = m.boundary(1, &lin(&m, 1, &[("(1,2)", 1)])).unwrap();
        assert_eq!(b, lin(&m, 0, &[("(2)", 1), ("(1)", -1)]));
        // σ = (1,1,2) - (1,1,1) is a cycle, but its transpose is not
        let sigma = lin(&m, 2, &[("(1,1,2)", 1), ("(1,1,1)", -1)]);
        assert!(m.boundary(2, &sigma).unwrap().is_zero());
        let t = m.act(Letter::Transposition(1), 2, &sigma).unwrap();
        assert_eq!(
            m.boundary(2, &t).unwrap(),
            lin(&m, 1, &[("(2,1)", 1), ("(1,2)", 1), ("(1,1)", -2)])
        );
        // augmentation
        assert_eq!(
            m.boundary(0, &lin(&m, 0, &[("(1)", 1)])).unwrap(),
            QVec::unit(0, Scalar::one())
        );
        m.complex(Ring::Z).unwrap();
    }

    #[test]
    fn cubical_boundaries() {
        let sys = n1_graph(&SimpleGraph::complete(2), 3, 100_000).unwrap();
        let f = free_linear(&sys);
        let m = ChainModel::new(&f);
        // the 1-cube 0 -> 1 (label lists values at points 0, 1)
        let e = cell(
            &m,
            1,
            &sys.label(
                1,
                (0..sys.num_cells(1))
                    .find(|&c| !f.is_degenerate(1, c))
                    .unwrap(),
            ),
        );
        let b = m.boundary(1, &QVec::unit(e, Scalar::one())).unwrap();
        let d0 = m
            .act(Letter::CubeFace(1, 0), 1, &QVec::unit(e, Scalar::one()))
            .unwrap();
        let d1 = m
            .act(Letter::CubeFace(1, 1), 1, &QVec::unit(e, Scalar::one()))
            .unwrap();
        assert_eq!(b, d0.sub(&d1));
        assert!(!b.is_zero());
        // degenerate cubes vanish in the normalized complex
        let s = m
            .act(Letter::Degeneracy(1), 1, &QVec::unit(e, Scalar::one()))
            .unwrap();
        assert!(s.is_zero());
        assert_eq!(m.dim(0), 2);
        assert_eq!(m.dim(1), 2);
        m.complex(Ring::Z).unwrap();
    }

    #[test]
    fn broken_differential_is_rejected() {
        let d1 = ExactMatrix::from_dense_i64(&[vec![1]]);
        let d2 = ExactMatrix::from_dense_i64(&[vec![1]]);
        let labels = vec![vec!["a".into()], vec!["b".into()], vec!["c".into()]];
        let e =
            ComplexRep::new(Ring::Z, 0, labels, vec![ExactMatrix::zero(0, 1), d1, d2]).unwrap_err();
        assert!(matches!(e, Error::Contract(_)));
        let half =
            ExactMatrix::from_columns(1, vec![QVec::unit(0, Scalar::from_ratio(1, 2))]).unwrap();
        let labels = vec![vec!["a".into()], vec!["b".into()]];
        assert!(ComplexRep::new(Ring::Z, 0, labels, vec![ExactMatrix::zero(0, 1), half]).is_err());
    }

    #[test]
    fn hollow_triangle() {
        let k = FacetComplex::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let o = or_a(&k, &[0, 1, 2], 2, 1000).unwrap();
        let c = simplicial_complex_of(&free_linear(&o), 2, Ring::Z).unwrap();
        let h = c.homology().unwrap();
        let betti: Vec<(i32, usize)> = h.iter().map(|(n, g)| (*n, g.betti)).collect();
        assert_eq!(betti, [(-1, 0), (0, 0), (1, 1)]);
        assert!(h.iter().all(|g| g.1.torsion.is_empty()));
    }

    #[test]
    fn json_round_trip() {
        let sys = sym_a(&edge(), 2, 1000).unwrap();
        let c = simplicial_complex_of(&free_linear(&sys), 2, Ring::Z).unwrap();
        let text = serde_json::to_string(&c.to_json()).unwrap();
        let back = ComplexRep::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn symmetric_degeneracies() {
        let pt = FacetComplex::new(vec!["p".into()], vec![vec![0]]).unwrap();
        let sys = sym_a(&pt, 3, 10).unwrap();
        let f = free_linear(&sys);
        let m = ChainModel::new(&f);
        // the only 1-simplex is fixed by t0, so b + t0 b = 2b
        let g = subcomplex_generators(SubcomplexKind::SDeg, &m, 1).unwrap();
        assert_eq!(g, vec![QVec::unit(0, Scalar::from_int(2))]);
        let zc = m.complex(Ring::Z).unwrap();
        let sub =
            lattice_subcomplex(&all_generators(SubcomplexKind::SDeg, &m).unwrap(), &zc).unwrap();
        assert_eq!(sub.basis(1), [QVec::unit(0, Scalar::from_int(2))]);
        // over Q the same generators span everything in positive degrees
        let qc = m.complex(Ring::Q).unwrap();
        let q = quotient_complex(&qc, &all_generators(SubcomplexKind::SDeg, &m).unwrap()).unwrap();
        assert_eq!(q.dims(), [(-1, 1), (0, 1), (1, 0), (2, 0), (3, 0)]);
        assert!(subcomplex_generators(SubcomplexKind::Con, &m, 1).is_err());
    }

    #[test]
    fn witness_lives_in_symmetric_degeneracies() {
        let x = counterexample_x(4).unwrap();
        let f = free_linear(&x);
        let m = ChainModel::new(&f);
        let a = crate::generators::witness_cycle_a(&x).unwrap();
        assert!(m.boundary(3, &a.coeffs).unwrap().is_zero());
        let zc = m.complex(Ring::Z).unwrap();
        let sub =
            lattice_subcomplex(&all_generators(SubcomplexKind::SDeg, &m).unwrap(), &zc).unwrap();
        let mut e = IntEchelon::new();
        for r in sub.basis(3) {
            e.insert(&to_int(r).unwrap());
        }
        assert!(e.contains(&to_int(&a.coeffs).unwrap()));
    }

    #[test]
    fn quotient_extremes() {
        let sys = sym_a(&edge(), 3, 1000).unwrap();
        let f = free_linear(&sys);
        let m = ChainModel::new(&f);
        let c = m.complex(Ring::Q).unwrap();
        let none: Vec<Vec<QVec>> = (c.lo()..=c.hi()).map(|_| Vec::new()).collect();
        let q = quotient_complex(&c, &none).unwrap();
        assert_eq!(q, c);
        let all: Vec<Vec<QVec>> = (c.lo()..=c.hi())
            .map(|n| {
                (0..c.dim(n))
                    .map(|j| QVec::unit(j, Scalar::one()))
                    .collect()
            })
            .collect();
        assert!(quotient_complex(&c, &all)
            .unwrap()
            .dims()
            .iter()
            .all(|d| d.1 == 0));
        // dividing out both kinds of degeneracy leaves one generator per face
        let q = quotient_complex(
            &c,
            &all_generators(SubcomplexKind::DegPlusSDeg, &m).unwrap(),
        )
        .unwrap();
        assert_eq!(q.dims(), [(-1, 1), (0, 2), (1, 1), (2, 0), (3, 0)]);
        let zc = c.with_ring(Ring::Z).unwrap();
        let sdeg = all_generators(SubcomplexKind::SDeg, &m).unwrap();
        assert!(matches!(
            quotient_complex(&zc, &sdeg),
            Err(Error::Unsupported(_))
        ));
        let deg = all_generators(SubcomplexKind::Deg, &m).unwrap();
        assert_eq!(
            quotient_complex(&zc, &deg).unwrap().dims(),
            [(-1, 1), (0, 2), (1, 2), (2, 2), (3, 2)]
        );
        // a non-closed family is caught
        let mut bad = none.clone();
        bad[2] = vec![QVec::unit(cell(&m, 1, "(1,2)"), Scalar::one())];
        assert!(matches!(
            subspace_subcomplex(&bad, &c),
            Err(Error::Contract(_))
        ));
    }

    /// Spans of `x - sgn(g) g x` over every group element.
    fn full_group_generators(m: &ChainModel, g: Group, n: i32) -> Vec<QVec> {
        let p = Projector::new(m, g, n, 1_000_000).unwrap();
        let mut out = Vec::new();
        for j in 0..m.dim(n) {
            for (k, c) in p.orbit_terms(j) {
                let v =
                    QVec::unit(j, Scalar::one()).sub(&QVec::unit(k as usize, Scalar::from_int(c)));
                if !v.is_zero() {
                    out.push(v);
                }
            }
        }
        out
    }

    fn same_spans(m: &ChainModel, kind: SubcomplexKind, group: impl Fn(i32) -> Group) {
        let zc = m.complex(Ring::Z).unwrap();
        for n in m.lo().max(1)..=m.hi() {
            let simple = subcomplex_generators(kind, m, n).unwrap();
            let full = full_group_generators(m, group(n), n);
            assert_eq!(
                span_dims(std::slice::from_ref(&simple)),
                span_dims(std::slice::from_ref(&full)),
                "degree {n}"
            );
            let mut e = IntEchelon::new();
            for v in &simple {
                e.insert(&to_int(v).unwrap());
            }
            for v in &full {
                assert!(e.contains(&to_int(v).unwrap()), "degree {n}");
            }
        }
        drop(zc);
    }

    fn small_complex() -> impl Strategy<Value = FacetComplex> {
        prop::collection::vec(prop::collection::btree_set(0usize..4, 1..=3), 1..=3).prop_map(|fs| {
            let facets: Vec<Vec<usize>> = fs.into_iter().map(|s| s.into_iter().collect()).collect();
            FacetComplex::new((0..4).map(|v| v.to_string()).collect(), facets).unwrap()
        })
    }

    fn small_graph() -> impl Strategy<Value = SimpleGraph> {
        prop::collection::btree_set((0usize..4, 0usize..4), 0..=4).prop_map(|es| {
            let edges = es.into_iter().filter(|(a, b)| a < b).collect();
            SimpleGraph::new((0..4).map(|v| v.to_string()).collect(), edges).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn simple_generators_suffice_simplicial(k in small_complex()) {
            let sys = sym_a(&k, 3, 10_000).unwrap();
            let f = free_linear(&sys);
            let m = ChainModel::truncated(&f, 2);
            same_spans(&m, SubcomplexKind::SDeg, Group::Sym);
        }

        #[test]
        fn simple_generators_suffice_cubical(g in small_graph()) {
            let sys = n1_graph(&g, 2, 100_000).unwrap();
            let f = free_linear(&sys);
            let m = ChainModel::new(&f);
            same_spans(&m, SubcomplexKind::RtCon, |_| Group::Hyperoct);
            same_spans(&m, SubcomplexKind::RCon, Group::Rev);
            same_spans(&m, SubcomplexKind::TCon, |_| Group::CubePerm);
        }

        #[test]
        fn quotients_split_dimensions(k in small_complex()) {
            let sys = sym_a(&k, 3, 10_000).unwrap();
            let f = free_linear(&sys);
            let m = ChainModel::truncated(&f, 3);
            let c = m.complex(Ring::Q).unwrap();
            for kind in [SubcomplexKind::Deg, SubcomplexKind::SDeg, SubcomplexKind::DegPlusSDeg] {
                let gens = all_generators(kind, &m).unwrap();
                let s = subspace_subcomplex(&gens, &c).unwrap();
                let q = quotient_complex(&c, &gens).unwrap();
                for n in c.lo()..=c.hi() {
                    prop_assert_eq!(c.dim(n), s.rank(n) + q.dim(n));
                }
                // each of these is acyclic, so dividing it out keeps homology
                prop_assert!(s.complex.homology().unwrap().iter().all(|h| h.1.is_zero()));
                prop_assert_eq!(c.homology().unwrap(), q.homology().unwrap());
                // closed over Z as well
                lattice_subcomplex(&gens, &c.with_ring(Ring::Z).unwrap()).unwrap();
            }
        }

        #[test]
        fn connections_are_acyclic(g in small_graph()) {
            let sys = n1_graph(&g, 3, 100_000).unwrap();
            let f = free_linear(&sys);
            let m = ChainModel::new(&f);
            let c = m.complex(Ring::Q).unwrap();
            for kind in [SubcomplexKind::Con, SubcomplexKind::PosCon] {
                let gens = all_generators(kind, &m).unwrap();
                let q = quotient_complex(&c, &gens).unwrap();
                prop_assert_eq!(c.homology().unwrap(), q.homology().unwrap());
                lattice_subcomplex(&gens, &c.with_ring(Ring::Z).unwrap()).unwrap();
            }
        }
    }
}
