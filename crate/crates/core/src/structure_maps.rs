//! Generators of the symmetric simplex category and the cube categories as
//! concrete maps of finite sets, plus the relations they satisfy.
//!
//! Simplicial objects are `[n] = {0, …, n}` for `n >= -1`; a map is its image
//! sequence. Cubical objects are `[1]^n`; a point is a bitmask with coordinate
//! `i` stored in bit `i - 1`, and a map is a table over all `2^n` points.
//!
//! Words are written in composition order: `[g1, g2]` is `g1 ∘ g2`, so `g2`
//! is applied to points first. A word is typed by the degree of its final
//! codomain, which is also the degree of the element it acts on.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symmetries::{HyperoctElement, Permutation};

/// Largest cube dimension for which maps are tabulated.
pub const MAX_CUBE_DIM: i32 = 8;
/// Guard on hom-set enumeration.
pub const MAX_HOM_DIM: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Simplicial,
    Cubical,
}

/// Which symmetry generators exist besides faces, degeneracies and connections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Flags {
    pub transpositions: bool,
    pub reversals: bool,
}

impl Flags {
    pub const NONE: Flags = Flags {
        transpositions: false,
        reversals: false,
    };
    pub const T: Flags = Flags {
        transpositions: true,
        reversals: false,
    };
    pub const R: Flags = Flags {
        transpositions: false,
        reversals: true,
    };
    pub const RT: Flags = Flags {
        transpositions: true,
        reversals: true,
    };
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.reversals, self.transpositions) {
            (false, false) => f.write_str("{}"),
            (false, true) => f.write_str("{t}"),
            (true, false) => f.write_str("{r}"),
            (true, true) => f.write_str("{r,t}"),
        }
    }
}

/// A generator tag. Simplicial indices are 0-based, cubical ones 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    /// simplicial face `d_i`
    Face(usize),
    /// cubical face `d_i^e`
    CubeFace(usize, u8),
    /// `s_i` in either mode
    Degeneracy(usize),
    /// connection `γ_i^e`: max for `e = 0`, min for `e = 1`
    Connection(usize, u8),
    /// `t_i` in either mode
    Transposition(usize),
    /// reversal `r_i`
    Reversal(usize),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Face(i) => write!(f, "d{i}"),
            Letter::CubeFace(i, e) => write!(f, "d{i}^{e}"),
            Letter::Degeneracy(i) => write!(f, "s{i}"),
            Letter::Connection(i, e) => write!(f, "g{i}^{e}"),
            Letter::Transposition(i) => write!(f, "t{i}"),
            Letter::Reversal(i) => write!(f, "r{i}"),
        }
    }
}

impl Letter {
    /// Domain degree of the generator whose codomain has degree `n`, or
    /// `None` when the index is out of range there.
    pub fn domain(&self, mode: Mode, n: i32) -> Option<i32> {
        let i = |k: usize| k as i32;
        match (mode, *self) {
            (Mode::Simplicial, Letter::Face(k)) => (n >= 0 && i(k) <= n).then_some(n - 1),
            (Mode::Simplicial, Letter::Degeneracy(k)) => (n >= 0 && i(k) <= n).then_some(n + 1),
            (Mode::Simplicial, Letter::Transposition(k)) => (i(k) < n).then_some(n),
            (Mode::Cubical, Letter::CubeFace(k, e)) => {
                (k >= 1 && i(k) <= n && e <= 1).then_some(n - 1)
            }
            (Mode::Cubical, Letter::Degeneracy(k)) => {
                (k >= 1 && i(k) <= n + 1 && n >= 0).then_some(n + 1)
            }
            (Mode::Cubical, Letter::Connection(k, e)) => {
                (k >= 1 && i(k) <= n && e <= 1).then_some(n + 1)
            }
            (Mode::Cubical, Letter::Transposition(k)) => (k >= 1 && i(k) < n).then_some(n),
            (Mode::Cubical, Letter::Reversal(k)) => (k >= 1 && i(k) <= n).then_some(n),
            _ => None,
        }
    }

    pub fn allowed(&self, flags: Flags) -> bool {
        match self {
            Letter::Transposition(_) => flags.transpositions,
            Letter::Reversal(_) => flags.reversals,
            _ => true,
        }
    }
}

/// Number of points of the object of degree `n`.
pub fn points(mode: Mode, n: i32) -> usize {
    match mode {
        Mode::Simplicial => (n + 1).max(0) as usize,
        Mode::Cubical => 1usize << n,
    }
}

/// A map of finite sets between two objects of one category.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteMap {
    mode: Mode,
    dom: i32,
    cod: i32,
    table: Vec<u32>,
}

impl FiniteMap {
    pub fn new(mode: Mode, dom: i32, cod: i32, table: Vec<u32>) -> Result<Self> {
        check_degree(mode, dom)?;
        check_degree(mode, cod)?;
        if table.len() != points(mode, dom) {
            return Err(Error::invalid(format!(
                "table has {} entries, domain has {} points",
                table.len(),
                points(mode, dom)
            )));
        }
        let bound = points(mode, cod) as u32;
        if let Some(bad) = table.iter().find(|&&v| v >= bound) {
            return Err(Error::invalid(format!(
                "value {bad} outside codomain of degree {cod}"
            )));
        }
        Ok(FiniteMap {
            mode,
            dom,
            cod,
            table,
        })
    }

    pub fn identity(mode: Mode, n: i32) -> Self {
        FiniteMap {
            mode,
            dom: n,
            cod: n,
            table: (0..points(mode, n) as u32).collect(),
        }
    }

    pub fn from_permutation(t: &Permutation) -> Self {
        let n = t.len() as i32 - 1;
        FiniteMap {
            mode: Mode::Simplicial,
            dom: n,
            cod: n,
            table: t.images().iter().map(|&x| x as u32).collect(),
        }
    }

    pub fn from_hyperoct(h: &HyperoctElement) -> Self {
        let n = h.degree();
        let table = (0..1u32 << n)
            .map(|v| {
                let bits: Vec<bool> = (0..n).map(|k| v >> k & 1 == 1).collect();
                h.apply_point(&bits)
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (k, b)| acc | ((*b as u32) << k))
            })
            .collect();
        FiniteMap {
            mode: Mode::Cubical,
            dom: n as i32,
            cod: n as i32,
            table,
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn domain(&self) -> i32 {
        self.dom
    }

    pub fn codomain(&self) -> i32 {
        self.cod
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &FiniteMap) -> Result<FiniteMap> {
        if g.mode != self.mode || g.cod != self.dom {
            return Err(Error::invalid(format!(
                "cannot compose a map out of degree {} after a map into degree {}",
                self.dom, g.cod
            )));
        }
        Ok(FiniteMap {
            mode: self.mode,
            dom: g.dom,
            cod: self.cod,
            table: g.table.iter().map(|&p| self.table[p as usize]).collect(),
        })
    }

    /// True when the map ignores the 1-based cube coordinate `i`.
    pub fn ignores_coordinate(&self, i: usize) -> bool {
        debug_assert_eq!(self.mode, Mode::Cubical);
        let bit = 1usize << (i - 1);
        (0..self.table.len()).all(|v| v & bit != 0 || self.table[v] == self.table[v | bit])
    }

    /// A cube map is degenerate when it factors through a degeneracy.
    pub fn is_degenerate_cube(&self) -> bool {
        (1..=self.dom as usize).any(|i| self.ignores_coordinate(i))
    }
}

fn check_degree(mode: Mode, n: i32) -> Result<()> {
    match mode {
        Mode::Simplicial if n >= -1 => Ok(()),
        Mode::Cubical if (0..=MAX_CUBE_DIM).contains(&n) => Ok(()),
        _ => Err(Error::invalid(format!("no {mode:?} object of degree {n}"))),
    }
}

/// The generator `letter` whose codomain has degree `n`.
pub fn generator_fn(mode: Mode, letter: Letter, n: i32) -> Result<FiniteMap> {
    let dom = letter.domain(mode, n).ok_or_else(|| {
        Error::invalid(format!(
            "{letter} is not a {mode:?} generator into degree {n}"
        ))
    })?;
    check_degree(mode, dom)?;
    check_degree(mode, n)?;
    let table: Vec<u32> = match letter {
        Letter::Face(i) => (0..points(mode, dom) as u32)
            .map(|j| if (j as usize) < i { j } else { j + 1 })
            .collect(),
        Letter::Degeneracy(i) if mode == Mode::Simplicial => (0..points(mode, dom) as u32)
            .map(|j| if (j as usize) <= i { j } else { j - 1 })
            .collect(),
        Letter::Transposition(i) if mode == Mode::Simplicial => (0..points(mode, dom) as u32)
            .map(|j| match j as usize {
                x if x == i => j + 1,
                x if x == i + 1 => j - 1,
                _ => j,
            })
            .collect(),
        Letter::CubeFace(i, e) => (0..points(mode, dom) as u32)
            .map(|v| insert_bit(v, i - 1, e as u32))
            .collect(),
        Letter::Degeneracy(i) => (0..points(mode, dom) as u32)
            .map(|v| delete_bit(v, i - 1))
            .collect(),
        Letter::Connection(i, e) => (0..points(mode, dom) as u32)
            .map(|v| {
                let (a, b) = (v >> (i - 1) & 1, v >> i & 1);
                let m = if e == 0 { a | b } else { a & b };
                insert_bit(delete_bit(delete_bit(v, i), i - 1), i - 1, m)
            })
            .collect(),
        Letter::Transposition(i) => (0..points(mode, dom) as u32)
            .map(|v| {
                let (a, b) = (v >> (i - 1) & 1, v >> i & 1);
                (v & !(0b11 << (i - 1))) | (b << (i - 1)) | (a << i)
            })
            .collect(),
        Letter::Reversal(i) => (0..points(mode, dom) as u32)
            .map(|v| v ^ (1 << (i - 1)))
            .collect(),
    };
    Ok(FiniteMap {
        mode,
        dom,
        cod: n,
        table,
    })
}

/// Inserts bit `b` at position `pos`, shifting higher bits up.
pub(crate) fn insert_bit(v: u32, pos: usize, b: u32) -> u32 {
    let low = v & ((1 << pos) - 1);
    let high = v >> pos;
    low | (b << pos) | (high << (pos + 1))
}

/// Removes the bit at position `pos`, shifting higher bits down.
pub(crate) fn delete_bit(v: u32, pos: usize) -> u32 {
    let low = v & ((1 << pos) - 1);
    let high = v >> (pos + 1);
    low | (high << pos)
}

/// A composite of generators, typed by the degree of its final codomain.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpWord {
    pub mode: Mode,
    pub target: i32,
    pub letters: Vec<Letter>,
}

impl OpWord {
    pub fn new(mode: Mode, target: i32, letters: Vec<Letter>) -> Self {
        OpWord {
            mode,
            target,
            letters,
        }
    }

    /// Degrees of the objects the word passes through, codomain first.
    pub fn degrees(&self) -> Option<Vec<i32>> {
        let mut out = vec![self.target];
        let mut n = self.target;
        for l in &self.letters {
            n = l.domain(self.mode, n)?;
            out.push(n);
        }
        Some(out)
    }

    pub fn source(&self) -> Option<i32> {
        self.degrees().map(|d| *d.last().expect("nonempty"))
    }

    pub fn evaluate(&self) -> Result<FiniteMap> {
        let mut acc = FiniteMap::identity(self.mode, self.target);
        let mut n = self.target;
        for l in &self.letters {
            let g = generator_fn(self.mode, *l, n)?;
            n = g.dom;
            acc = acc.compose(&g)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for OpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "id[{}]", self.target);
        }
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// One instantiated relation `lhs = rhs`.
#[derive(Clone, Debug)]
pub struct IdentityInstance {
    pub name: &'static str,
    pub case: &'static str,
    pub degree: i32,
    pub indices: Vec<(&'static str, i64)>,
    pub lhs: OpWord,
    pub rhs: OpWord,
}

/// Outcome of checking one instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub mode: Mode,
    pub identity: String,
    pub case: String,
    pub degree: i32,
    pub indices: Vec<(String, i64)>,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

struct Builder {
    mode: Mode,
    max: i32,
    out: Vec<IdentityInstance>,
}

impl Builder {
    fn push(
        &mut self,
        name: &'static str,
        case: &'static str,
        n: i32,
        indices: &[(&'static str, i64)],
        lhs: Vec<Letter>,
        rhs: Vec<Letter>,
    ) {
        let lhs = OpWord::new(self.mode, n, lhs);
        let rhs = OpWord::new(self.mode, n, rhs);
        let Some(ld) = lhs.degrees() else { return };
        if ld.iter().any(|&d| d > self.max)
            || (self.mode == Mode::Cubical && ld.iter().any(|&d| d < 0))
        {
            return;
        }
        // instances whose right side would leave the degree window are skipped too
        if let Some(rd) = rhs.degrees() {
            if rd.iter().any(|&d| d > self.max) {
                return;
            }
        }
        self.out.push(IdentityInstance {
            name,
            case,
            degree: n,
            indices: indices.to_vec(),
            lhs,
            rhs,
        });
    }
}

/// Every relation of the chosen category instantiated at every index tuple
/// for which the left side is defined and all objects have degree `<= max_degree`.
pub fn identity_instances(mode: Mode, max_degree: i32) -> Vec<IdentityInstance> {
    let mut b = Builder {
        mode,
        max: max_degree,
        out: Vec::new(),
    };
    let top = (max_degree + 2).max(0) as usize;
    let lo = if mode == Mode::Simplicial { -1 } else { 0 };
    for n in lo..=max_degree {
        match mode {
            Mode::Simplicial => simplicial_relations(&mut b, n, top),
            Mode::Cubical => cubical_relations(&mut b, n, top),
        }
    }
    b.out
}

fn simplicial_relations(b: &mut Builder, n: i32, top: usize) {
    use Letter::{Degeneracy as S, Face as D, Transposition as T};
    for j in 0..=top {
        for i in 0..=top {
            let ix = [("j", j as i64), ("i", i as i64)];
            if j <= i {
                b.push(
                    "face_face",
                    "j<=i",
                    n,
                    &ix,
                    vec![D(j), D(i)],
                    vec![D(i + 1), D(j)],
                );
            }
            if j >= i {
                b.push(
                    "degeneracy_degeneracy",
                    "j>=i",
                    n,
                    &ix,
                    vec![S(j), S(i)],
                    vec![S(i), S(j + 1)],
                );
            }
            // s_j d_i
            if j + 1 < i {
                b.push(
                    "degeneracy_face",
                    "j<i-1",
                    n,
                    &ix,
                    vec![S(j), D(i)],
                    vec![D(i - 1), S(j)],
                );
            } else if j == i || j + 1 == i {
                b.push(
                    "degeneracy_face",
                    "j=i,i-1",
                    n,
                    &ix,
                    vec![S(j), D(i)],
                    vec![],
                );
            } else {
                b.push(
                    "degeneracy_face",
                    "j>i",
                    n,
                    &ix,
                    vec![S(j), D(i)],
                    vec![D(i), S(j - 1)],
                );
            }
            // t_j d_i
            if j + 1 < i {
                b.push(
                    "transposition_face",
                    "j<i-1",
                    n,
                    &ix,
                    vec![T(j), D(i)],
                    vec![D(i), T(j)],
                );
            } else if j + 1 == i {
                b.push(
                    "transposition_face",
                    "j=i-1",
                    n,
                    &ix,
                    vec![T(j), D(i)],
                    vec![D(i - 1)],
                );
            } else if j == i {
                b.push(
                    "transposition_face",
                    "j=i",
                    n,
                    &ix,
                    vec![T(j), D(i)],
                    vec![D(i + 1)],
                );
            } else {
                b.push(
                    "transposition_face",
                    "j>i",
                    n,
                    &ix,
                    vec![T(j), D(i)],
                    vec![D(i), T(j - 1)],
                );
            }
            // s_j t_i
            if j + 1 < i {
                b.push(
                    "degeneracy_transposition",
                    "j<i-1",
                    n,
                    &ix,
                    vec![S(j), T(i)],
                    vec![T(i - 1), S(j)],
                );
            } else if j + 1 == i {
                b.push(
                    "degeneracy_transposition",
                    "j=i-1",
                    n,
                    &ix,
                    vec![S(j), T(i)],
                    vec![T(i - 1), S(i), T(i - 1)],
                );
            } else if j == i {
                b.push(
                    "degeneracy_transposition",
                    "j=i",
                    n,
                    &ix,
                    vec![S(j), T(i)],
                    vec![S(j)],
                );
            } else if j == i + 1 {
                b.push(
                    "degeneracy_transposition",
                    "j=i+1",
                    n,
                    &ix,
                    vec![S(j), T(i)],
                    vec![T(i), S(i), T(i + 1)],
                );
            } else {
                b.push(
                    "degeneracy_transposition",
                    "j>i+1",
                    n,
                    &ix,
                    vec![S(j), T(i)],
                    vec![T(i), S(j)],
                );
            }
            if i.abs_diff(j) > 1 {
                b.push(
                    "transposition_commute",
                    "|i-j|>1",
                    n,
                    &ix,
                    vec![T(j), T(i)],
                    vec![T(i), T(j)],
                );
            }
        }
        let ix = [("i", j as i64)];
        b.push(
            "transposition_involution",
            "",
            n,
            &ix,
            vec![T(j), T(j)],
            vec![],
        );
        b.push(
            "transposition_braid",
            "",
            n,
            &ix,
            [T(j), T(j + 1)].repeat(3),
            vec![],
        );
    }
}

fn cubical_relations(b: &mut Builder, n: i32, top: usize) {
    use Letter::{
        Connection as G, CubeFace as D, Degeneracy as S, Reversal as R, Transposition as T,
    };
    for j in 1..=top {
        for i in 1..=top {
            for e in 0..=1u8 {
                for h in 0..=1u8 {
                    let ix = [
                        ("j", j as i64),
                        ("i", i as i64),
                        ("e", e as i64),
                        ("h", h as i64),
                    ];
                    if j <= i {
                        b.push(
                            "face_face",
                            "j<=i",
                            n,
                            &ix,
                            vec![D(j, h), D(i, e)],
                            vec![D(i + 1, e), D(j, h)],
                        );
                    }
                    // γ_i^h γ_j^e
                    if j < i {
                        b.push(
                            "connection_connection",
                            "j<i",
                            n,
                            &ix,
                            vec![G(i, h), G(j, e)],
                            vec![G(j, e), G(i + 1, h)],
                        );
                    } else if j == i && h == e {
                        b.push(
                            "connection_connection",
                            "j=i,h=e",
                            n,
                            &ix,
                            vec![G(i, h), G(j, e)],
                            vec![G(i, e), G(i + 1, e)],
                        );
                    }
                    // γ_j^h d_i^e
                    if j + 1 < i {
                        b.push(
                            "connection_face",
                            "j<i-1",
                            n,
                            &ix,
                            vec![G(j, h), D(i, e)],
                            vec![D(i - 1, e), G(j, h)],
                        );
                    } else if (j + 1 == i || j == i) && e == h {
                        b.push(
                            "connection_face",
                            "j=i-1,i;e=h",
                            n,
                            &ix,
                            vec![G(j, h), D(i, e)],
                            vec![],
                        );
                    } else if j + 1 == i || j == i {
                        b.push(
                            "connection_face",
                            "j=i-1,i;e=1-h",
                            n,
                            &ix,
                            vec![G(j, h), D(i, e)],
                            vec![D(j, e), S(j)],
                        );
                    } else {
                        b.push(
                            "connection_face",
                            "j>i",
                            n,
                            &ix,
                            vec![G(j, h), D(i, e)],
                            vec![D(i, e), G(j - 1, h)],
                        );
                    }
                }
                let ix = [("j", j as i64), ("i", i as i64), ("e", e as i64)];
                // s_j d_i^e
                if j < i {
                    b.push(
                        "degeneracy_face",
                        "j<i",
                        n,
                        &ix,
                        vec![S(j), D(i, e)],
                        vec![D(i - 1, e), S(j)],
                    );
                } else if j == i {
                    b.push(
                        "degeneracy_face",
                        "j=i",
                        n,
                        &ix,
                        vec![S(j), D(i, e)],
                        vec![],
                    );
                } else {
                    b.push(
                        "degeneracy_face",
                        "j>i",
                        n,
                        &ix,
                        vec![S(j), D(i, e)],
                        vec![D(i, e), S(j - 1)],
                    );
                }
                // s_j γ_i^e
                if j < i {
                    b.push(
                        "degeneracy_connection",
                        "j<i",
                        n,
                        &ix,
                        vec![S(j), G(i, e)],
                        vec![G(i - 1, e), S(j)],
                    );
                } else if j == i {
                    b.push(
                        "degeneracy_connection",
                        "j=i",
                        n,
                        &ix,
                        vec![S(j), G(i, e)],
                        vec![S(i), S(i)],
                    );
                } else {
                    b.push(
                        "degeneracy_connection",
                        "j>i",
                        n,
                        &ix,
                        vec![S(j), G(i, e)],
                        vec![G(i, e), S(j + 1)],
                    );
                }
                // γ_j^e t_i
                if j + 1 < i {
                    b.push(
                        "connection_transposition",
                        "j<i-1",
                        n,
                        &ix,
                        vec![G(j, e), T(i)],
                        vec![T(i - 1), G(j, e)],
                    );
                } else if j + 1 == i {
                    b.push(
                        "connection_transposition",
                        "j=i-1",
                        n,
                        &ix,
                        vec![G(j, e), T(i)],
                        vec![T(i - 1), G(i, e), T(i - 1)],
                    );
                } else if j == i {
                    b.push(
                        "connection_transposition",
                        "j=i",
                        n,
                        &ix,
                        vec![G(j, e), T(i)],
                        vec![G(j, e)],
                    );
                } else if j == i + 1 {
                    b.push(
                        "connection_transposition",
                        "j=i+1",
                        n,
                        &ix,
                        vec![G(j, e), T(i)],
                        vec![T(i), G(i, e), T(i + 1)],
                    );
                } else {
                    b.push(
                        "connection_transposition",
                        "j>i+1",
                        n,
                        &ix,
                        vec![G(j, e), T(i)],
                        vec![T(i), G(j, e)],
                    );
                }
                // t_j d_i^e
                if j + 1 < i {
                    b.push(
                        "transposition_face",
                        "j<i-1",
                        n,
                        &ix,
                        vec![T(j), D(i, e)],
                        vec![D(i, e), T(j)],
                    );
                } else if j + 1 == i {
                    b.push(
                        "transposition_face",
                        "j=i-1",
                        n,
                        &ix,
                        vec![T(j), D(i, e)],
                        vec![D(i - 1, e)],
                    );
                } else if j == i {
                    b.push(
                        "transposition_face",
                        "j=i",
                        n,
                        &ix,
                        vec![T(j), D(i, e)],
                        vec![D(i + 1, e)],
                    );
                } else {
                    b.push(
                        "transposition_face",
                        "j>i",
                        n,
                        &ix,
                        vec![T(j), D(i, e)],
                        vec![D(i, e), T(j - 1)],
                    );
                }
                // r_j d_i^e
                if j < i {
                    b.push(
                        "reversal_face",
                        "j<i",
                        n,
                        &ix,
                        vec![R(j), D(i, e)],
                        vec![D(i, e), R(j)],
                    );
                } else if j == i {
                    b.push(
                        "reversal_face",
                        "j=i",
                        n,
                        &ix,
                        vec![R(j), D(i, e)],
                        vec![D(i, 1 - e)],
                    );
                } else {
                    b.push(
                        "reversal_face",
                        "j>i",
                        n,
                        &ix,
                        vec![R(j), D(i, e)],
                        vec![D(i, e), R(j - 1)],
                    );
                }
                // r_j γ_i^e
                if j < i {
                    b.push(
                        "reversal_connection",
                        "j<i",
                        n,
                        &ix,
                        vec![R(j), G(i, e)],
                        vec![G(i, e), R(j)],
                    );
                } else if j == i {
                    b.push(
                        "reversal_connection",
                        "j=i",
                        n,
                        &ix,
                        vec![R(j), G(i, e)],
                        vec![G(i, 1 - e), R(j), R(j + 1)],
                    );
                } else {
                    b.push(
                        "reversal_connection",
                        "j>i",
                        n,
                        &ix,
                        vec![R(j), G(i, e)],
                        vec![G(i, e), R(j + 1)],
                    );
                }
            }
            let ix = [("j", j as i64), ("i", i as i64)];
            // s_i s_j
            if j <= i {
                b.push(
                    "degeneracy_degeneracy",
                    "j<=i",
                    n,
                    &ix,
                    vec![S(i), S(j)],
                    vec![S(j), S(i + 1)],
                );
            }
            // s_i t_j
            if j + 1 < i {
                b.push(
                    "degeneracy_transposition",
                    "j<i-1",
                    n,
                    &ix,
                    vec![S(i), T(j)],
                    vec![T(j), S(i)],
                );
            } else if j + 1 == i {
                b.push(
                    "degeneracy_transposition",
                    "j=i-1",
                    n,
                    &ix,
                    vec![S(i), T(j)],
                    vec![S(i - 1)],
                );
            } else if j == i {
                b.push(
                    "degeneracy_transposition",
                    "j=i",
                    n,
                    &ix,
                    vec![S(i), T(j)],
                    vec![S(i + 1)],
                );
            } else {
                b.push(
                    "degeneracy_transposition",
                    "j>i",
                    n,
                    &ix,
                    vec![S(i), T(j)],
                    vec![T(j - 1), S(i)],
                );
            }
            if i.abs_diff(j) > 1 {
                b.push(
                    "transposition_commute",
                    "|i-j|>1",
                    n,
                    &ix,
                    vec![T(j), T(i)],
                    vec![T(i), T(j)],
                );
            }
            // s_j r_i
            if j < i {
                b.push(
                    "degeneracy_reversal",
                    "j<i",
                    n,
                    &ix,
                    vec![S(j), R(i)],
                    vec![R(i - 1), S(j)],
                );
            } else if j == i {
                b.push(
                    "degeneracy_reversal",
                    "j=i",
                    n,
                    &ix,
                    vec![S(j), R(i)],
                    vec![S(i)],
                );
            } else {
                b.push(
                    "degeneracy_reversal",
                    "j>i",
                    n,
                    &ix,
                    vec![S(j), R(i)],
                    vec![R(i), S(j)],
                );
            }
            // t_j r_i
            if j + 1 == i {
                b.push(
                    "transposition_reversal",
                    "j=i-1",
                    n,
                    &ix,
                    vec![T(j), R(i)],
                    vec![R(j), T(j)],
                );
            } else if j == i {
                b.push(
                    "transposition_reversal",
                    "j=i",
                    n,
                    &ix,
                    vec![T(j), R(i)],
                    vec![R(i + 1), T(j)],
                );
            } else {
                b.push(
                    "transposition_reversal",
                    "else",
                    n,
                    &ix,
                    vec![T(j), R(i)],
                    vec![R(i), T(j)],
                );
            }
            // r_i r_j
            if j == i {
                b.push("reversal_reversal", "j=i", n, &ix, vec![R(i), R(j)], vec![]);
            } else {
                b.push(
                    "reversal_reversal",
                    "else",
                    n,
                    &ix,
                    vec![R(i), R(j)],
                    vec![R(j), R(i)],
                );
            }
        }
        let ix = [("i", j as i64)];
        b.push(
            "transposition_involution",
            "",
            n,
            &ix,
            vec![T(j), T(j)],
            vec![],
        );
        b.push(
            "transposition_braid",
            "",
            n,
            &ix,
            [T(j), T(j + 1)].repeat(3),
            vec![],
        );
    }
}

fn record(
    mode: Mode,
    inst: &IdentityInstance,
    pass: bool,
    witness: Option<String>,
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
        pass,
        witness,
    }
}

/// Checks every relation extensionally, as maps of finite sets.
pub fn identity_suite(mode: Mode, max_degree: i32) -> Result<Vec<IdentityRecord>> {
    let cap = match mode {
        Mode::Simplicial => 8,
        Mode::Cubical => MAX_CUBE_DIM - 2,
    };
    if max_degree > cap {
        return Err(Error::resource(format!(
            "identity suite is limited to degree {cap} in {mode:?} mode"
        )));
    }
    Ok(identity_instances(mode, max_degree)
        .iter()
        .map(|inst| check_instance(mode, inst))
        .collect())
}

fn check_instance(mode: Mode, inst: &IdentityInstance) -> IdentityRecord {
    let l = inst.lhs.evaluate();
    let r = inst.rhs.evaluate();
    match (l, r) {
        (Ok(l), Ok(r)) if l == r => record(mode, inst, true, None),
        (Ok(l), Ok(r)) => {
            let at = l
                .table()
                .iter()
                .zip(r.table())
                .position(|(a, b)| a != b)
                .map(|p| format!("point {p}: {} vs {}", l.table()[p], r.table()[p]))
                .unwrap_or_else(|| format!("degrees {}->{} vs {}->{}", l.dom, l.cod, r.dom, r.cod));
            record(mode, inst, false, Some(at))
        }
        (_, Err(e)) | (Err(e), _) => record(mode, inst, false, Some(e.to_string())),
    }
}

/// Generators with codomain of degree `j` whose domain degree is at most `bound`.
pub fn cube_generators_into(j: i32, flags: Flags, bound: i32) -> Vec<Letter> {
    let mut out = Vec::new();
    let ju = j as usize;
    for i in 1..=ju {
        out.push(Letter::CubeFace(i, 0));
        out.push(Letter::CubeFace(i, 1));
    }
    if j < bound {
        for i in 1..=ju + 1 {
            out.push(Letter::Degeneracy(i));
        }
        for i in 1..=ju {
            out.push(Letter::Connection(i, 0));
            out.push(Letter::Connection(i, 1));
        }
    }
    if flags.transpositions {
        for i in 1..ju {
            out.push(Letter::Transposition(i));
        }
    }
    if flags.reversals {
        for i in 1..=ju {
            out.push(Letter::Reversal(i));
        }
    }
    out
}

/// All maps into `[1]^m` reachable from the identity by precomposing
/// generators, without passing through objects above degree `bound`.
/// Entry `k` of the result holds the maps out of `[1]^k`, sorted.
pub fn hom_closure(flags: Flags, m: usize, bound: usize) -> Result<Vec<Vec<FiniteMap>>> {
    if m > bound || bound > MAX_HOM_DIM + 1 {
        return Err(Error::resource(format!(
            "hom-set closure into degree {m} with bound {bound} exceeds the guard"
        )));
    }
    let bound = bound as i32;
    let gens: Vec<Vec<FiniteMap>> = (0..=bound)
        .map(|j| {
            cube_generators_into(j, flags, bound)
                .into_iter()
                .map(|l| generator_fn(Mode::Cubical, l, j).expect("in range"))
                .collect()
        })
        .collect();
    let mut seen: Vec<HashSet<Vec<u32>>> = vec![HashSet::new(); bound as usize + 1];
    let start = FiniteMap::identity(Mode::Cubical, m as i32);
    seen[m].insert(start.table.clone());
    let mut queue = VecDeque::from([start]);
    while let Some(f) = queue.pop_front() {
        for g in &gens[f.dom as usize] {
            let h = f.compose(g).expect("typed");
            if seen[h.dom as usize].insert(h.table.clone()) {
                queue.push_back(h);
            }
        }
    }
    Ok(seen
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            let mut v: Vec<FiniteMap> = s
                .into_iter()
                .map(|t| FiniteMap {
                    mode: Mode::Cubical,
                    dom: k as i32,
                    cod: m as i32,
                    table: t,
                })
                .collect();
            v.sort();
            v
        })
        .collect())
}

/// `Hom([1]^k, [1]^m)` in the cube category with the given symmetries,
/// deduplicated extensionally and sorted by truth table.
pub fn enumerate_hom(flags: Flags, k: usize, m: usize) -> Result<Vec<FiniteMap>> {
    if k > MAX_HOM_DIM || m > MAX_HOM_DIM {
        return Err(Error::resource(format!(
            "hom-set enumeration is limited to degree {MAX_HOM_DIM}"
        )));
    }
    let mut all = hom_closure(flags, m, k.max(m))?;
    Ok(std::mem::take(&mut all[k]))
}

/// The same hom-set built from the factorization
/// faces ∘ connections ∘ reversals ∘ permutation ∘ degeneracies.
pub fn enumerate_hom_normal_form(flags: Flags, k: usize, m: usize) -> Result<Vec<FiniteMap>> {
    if k > MAX_HOM_DIM || m > MAX_HOM_DIM {
        return Err(Error::resource(format!(
            "hom-set enumeration is limited to degree {MAX_HOM_DIM}"
        )));
    }
    let mut out: BTreeSet<Vec<u32>> = BTreeSet::new();
    for a in 0..=k {
        // connection composites [1]^a -> [1]^b, grouped by b
        let mut conn: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); a + 1];
        let id_a = FiniteMap::identity(Mode::Cubical, a as i32);
        conn[a].insert(id_a.table.clone());
        let mut frontier = vec![id_a];
        while let Some(f) = frontier.pop() {
            for i in 1..f.cod as usize {
                for e in 0..=1 {
                    let g = generator_fn(Mode::Cubical, Letter::Connection(i, e), f.cod - 1)
                        .expect("in range");
                    let h = g.compose(&f).expect("typed");
                    if conn[h.cod as usize].insert(h.table.clone()) {
                        frontier.push(h);
                    }
                }
            }
        }
        let perms = if flags.transpositions {
            crate::symmetries::all_permutations(a)
        } else {
            vec![Permutation::identity(a)]
        };
        let masks: Vec<u32> = if flags.reversals {
            (0..1u32 << a).collect()
        } else {
            vec![0]
        };
        for kept in subsets_of_size(k, a) {
            let degen: Vec<u32> = (0..1u32 << k)
                .map(|v| {
                    kept.iter()
                        .enumerate()
                        .fold(0, |acc, (p, &c)| acc | ((v >> c & 1) << p))
                })
                .collect();
            for p in &perms {
                let h = HyperoctElement::new(p.clone(), crate::symmetries::ReversalMask::zero(a))
                    .expect("sizes");
                let pm = FiniteMap::from_hyperoct(&h);
                for &mask in &masks {
                    let pre: Vec<u32> =
                        degen.iter().map(|&v| pm.table[v as usize] ^ mask).collect();
                    for (b, set) in conn.iter().enumerate().take(m.min(a) + 1) {
                        for c in set {
                            let mid: Vec<u32> = pre.iter().map(|&v| c[v as usize]).collect();
                            for (slots, consts) in face_insertions(b, m) {
                                out.insert(
                                    mid.iter()
                                        .map(|&v| {
                                            slots.iter().enumerate().fold(consts, |acc, (p, &s)| {
                                                acc | ((v >> p & 1) << s)
                                            })
                                        })
                                        .collect(),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|table| FiniteMap {
            mode: Mode::Cubical,
            dom: k as i32,
            cod: m as i32,
            table,
        })
        .collect())
}

fn subsets_of_size(n: usize, a: usize) -> Vec<Vec<usize>> {
    (0..1u32 << n)
        .filter(|s| s.count_ones() as usize == a)
        .map(|s| (0..n).filter(|&i| s >> i & 1 == 1).collect())
        .collect()
}

/// Order-preserving placements of `b` coordinates among `m`, with the other
/// slots fixed to constants: (slot of each kept coordinate, constant bits).
fn face_insertions(b: usize, m: usize) -> Vec<(Vec<usize>, u32)> {
    let mut out = Vec::new();
    for slots in subsets_of_size(m, b) {
        let free: Vec<usize> = (0..m).filter(|s| !slots.contains(s)).collect();
        for w in 0..1u32 << free.len() {
            let consts = free
                .iter()
                .enumerate()
                .fold(0, |acc, (p, &s)| acc | ((w >> p & 1) << s));
            out.push((slots.clone(), consts));
        }
    }
    out
}
