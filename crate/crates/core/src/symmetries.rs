//! Permutations, reversal masks and hyperoctahedral elements.
//!
//! A `Permutation` stores images 0-based. Simplicial permutations act on
//! `[n] = {0, …, n}` directly; cubical ones act on coordinates `1..=n`, and
//! the `*_cubical` helpers do the index shift so callers never mix the two.

use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the size of an enumerated group (10!).
pub const DEFAULT_GROUP_CAP: u64 = 3_628_800;

/// A bijection of `{0, …, len-1}`; `images[j]` is the image of `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation {
            images: (0..len).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || seen[x] {
                return Err(Error::invalid(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based images of the cube coordinates `1..=n`.
    pub fn from_cubical(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::invalid("cubical permutations are 1-based"));
        }
        Permutation::from_images(images.iter().map(|x| x - 1).collect())
    }

    /// The transposition of `i` and `i+1` (0-based).
    pub fn adjacent(len: usize, i: usize) -> Result<Self> {
        if i + 1 >= len {
            return Err(Error::invalid(format!(
                "no adjacent swap {i} on {len} points"
            )));
        }
        let mut p = Permutation::identity(len);
        p.images.swap(i, i + 1);
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    /// Image of the 1-based cube coordinate `i`.
    pub fn apply_cubical(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    pub fn to_cubical(&self) -> Vec<usize> {
        self.images.iter().map(|x| x + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, x)| i == *x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.len(),
            other.len(),
            "composing permutations of different sizes"
        );
        Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (j, &x) in self.images.iter().enumerate() {
            inv[x] = j;
        }
        Permutation { images: inv }
    }

    pub fn inversions(&self) -> usize {
        let n = self.len();
        let mut c = 0;
        for i in 0..n {
            for j in i + 1..n {
                if self.images[i] > self.images[j] {
                    c += 1;
                }
            }
        }
        c
    }

    /// Positions `i` of adjacent swaps `s_i = (i i+1)` with
    /// `self = s_{w[0]} ∘ s_{w[1]} ∘ … ∘ s_{w[k-1]}` and `k` the inversion count.
    pub fn adjacent_word(&self) -> Vec<usize> {
        // bubble sort p down to the identity: p ∘ s_{a1} ∘ … ∘ s_{ak} = id
        let mut p = self.images.clone();
        let mut swaps = Vec::new();
        loop {
            let Some(i) = (0..p.len().saturating_sub(1)).find(|&i| p[i] > p[i + 1]) else {
                break;
            };
            p.swap(i, i + 1);
            swaps.push(i);
        }
        swaps.reverse();
        swaps
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

/// Sign of a permutation.
pub fn sign_perm(t: &Permutation) -> i64 {
    if t.inversions().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A subset of the cube coordinates `1..=n`, as bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReversalMask {
    bits: Vec<bool>,
}

impl ReversalMask {
    pub fn zero(n: usize) -> Self {
        ReversalMask {
            bits: vec![false; n],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        ReversalMask { bits }
    }

    /// Mask with bit `k` (0-based) set iff bit `k` of `word` is set.
    pub fn from_word(n: usize, word: u64) -> Self {
        ReversalMask {
            bits: (0..n).map(|k| word >> k & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Bit at the 1-based coordinate `i`.
    pub fn get(&self, i: usize) -> bool {
        self.bits[i - 1]
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn xor(&self, o: &ReversalMask) -> ReversalMask {
        ReversalMask {
            bits: self.bits.iter().zip(&o.bits).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// 1-based coordinates that are flipped.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.len()).filter(|&i| self.get(i)).collect()
    }
}

pub fn sign_reversal(a: &ReversalMask) -> i64 {
    if a.weight().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `h = t a`: as a map of the cube, first flip by `a`, then permute by `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HyperoctElement {
    pub perm: Permutation,
    pub mask: ReversalMask,
}

impl HyperoctElement {
    pub fn new(perm: Permutation, mask: ReversalMask) -> Result<Self> {
        if perm.len() != mask.len() {
            return Err(Error::invalid(format!(
                "permutation degree {} differs from mask length {}",
                perm.len(),
                mask.len()
            )));
        }
        Ok(HyperoctElement { perm, mask })
    }

    pub fn identity(n: usize) -> Self {
        HyperoctElement {
            perm: Permutation::identity(n),
            mask: ReversalMask::zero(n),
        }
    }

    pub fn degree(&self) -> usize {
        self.perm.len()
    }

    /// Action on a point of the cube: coordinate `j` of `v` lands in slot `t(j)`.
    pub fn apply_point(&self, v: &[bool]) -> Vec<bool> {
        let mut out = vec![false; v.len()];
        for (j, &x) in v.iter().enumerate() {
            out[self.perm.apply(j)] = x ^ self.mask.bits[j];
        }
        out
    }

    /// `self ∘ other` as maps of the cube.
    pub fn compose(&self, other: &HyperoctElement) -> HyperoctElement {
        // a1 ∘ t2 = t2 ∘ a' with a'_j = a1_{t2(j)}
        let pulled = ReversalMask {
            bits: (0..self.degree())
                .map(|j| self.mask.bits[other.perm.apply(j)])
                .collect(),
        };
        HyperoctElement {
            perm: self.perm.compose(&other.perm),
            mask: other.mask.xor(&pulled),
        }
    }

    pub fn inverse(&self) -> HyperoctElement {
        // (t a)^{-1} = a t^{-1} = t^{-1} a' with a'_j = a_{t^{-1}(j)}
        let inv = self.perm.inverse();
        let mask = ReversalMask {
            bits: (0..self.degree())
                .map(|j| self.mask.bits[inv.apply(j)])
                .collect(),
        };
        HyperoctElement { perm: inv, mask }
    }
}

pub fn sign_hyperoct(h: &HyperoctElement) -> i64 {
    sign_perm(&h.perm) * sign_reversal(&h.mask)
}

/// The permutation of `[n-1]` left after deleting column `i` and row `t(i)`
/// from the permutation matrix of `t` on `[n]`.
pub fn phi(i: usize, t: &Permutation) -> Result<Permutation> {
    let len = t.len();
    if len < 2 {
        return Err(Error::invalid("phi needs a permutation of [n] with n >= 1"));
    }
    if i >= len {
        return Err(Error::invalid(format!("index {i} outside [{}]", len - 1)));
    }
    let ti = t.apply(i);
    let images = (0..len - 1)
        .map(|j| {
            let src = if j < i { j } else { j + 1 };
            let k = t.apply(src);
            if k < ti {
                k
            } else {
                k - 1
            }
        })
        .collect();
    Ok(Permutation { images })
}

/// Deletes the 1-based coordinate `i` from a mask.
pub fn psi(i: usize, a: &ReversalMask) -> Result<ReversalMask> {
    if i == 0 || i > a.len() {
        return Err(Error::invalid(format!(
            "coordinate {i} outside 1..={}",
            a.len()
        )));
    }
    let mut bits = a.bits.clone();
    bits.remove(i - 1);
    Ok(ReversalMask { bits })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    /// Sym([n]), (n+1)! elements
    Sym,
    /// Z_2^n
    Rev,
    /// S_n ⋉ Z_2^n
    Hyperoct,
}

/// Group order, or `None` on overflow.
pub fn group_order(n: usize, kind: GroupKind) -> Option<u64> {
    let fact = |k: usize| (1..=k as u64).try_fold(1u64, |a, b| a.checked_mul(b));
    match kind {
        GroupKind::Sym => fact(n + 1),
        GroupKind::Rev => 1u64.checked_shl(n as u32).filter(|_| n < 64),
        GroupKind::Hyperoct => fact(n)?.checked_mul(1u64.checked_shl(n as u32).filter(|_| n < 64)?),
    }
}

fn check_cap(n: usize, kind: GroupKind, cap: u64) -> Result<()> {
    match group_order(n, kind) {
        Some(k) if k <= cap => Ok(()),
        _ => Err(Error::resource(format!(
            "{kind:?} group in degree {n} exceeds the cap of {cap} elements"
        ))),
    }
}

/// All permutations of `len` points, in lexicographic order.
pub fn all_permutations(len: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..len).collect();
    loop {
        out.push(Permutation {
            images: cur.clone(),
        });
        // next lexicographic permutation
        let Some(i) = (0..len.saturating_sub(1))
            .rev()
            .find(|&i| cur[i] < cur[i + 1])
        else {
            return out;
        };
        let j = (i + 1..len)
            .rev()
            .find(|&j| cur[j] > cur[i])
            .expect("successor");
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
}

/// Enumerated symmetry group elements of one kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupElements {
    Sym(Vec<Permutation>),
    Rev(Vec<ReversalMask>),
    Hyperoct(Vec<HyperoctElement>),
}

impl GroupElements {
    pub fn len(&self) -> usize {
        match self {
            GroupElements::Sym(v) => v.len(),
            GroupElements::Rev(v) => v.len(),
            GroupElements::Hyperoct(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Every element of the group exactly once, in a fixed order.
pub fn enumerate(n: usize, kind: GroupKind, cap: u64) -> Result<GroupElements> {
    check_cap(n, kind, cap)?;
    Ok(match kind {
        GroupKind::Sym => GroupElements::Sym(all_permutations(n + 1)),
        GroupKind::Rev => GroupElements::Rev(
            (0..1u64 << n)
                .map(|w| ReversalMask::from_word(n, w))
                .collect(),
        ),
        GroupKind::Hyperoct => {
            let perms = all_permutations(n);
            let mut v = Vec::with_capacity(perms.len() << n);
            for p in &perms {
                for w in 0..1u64 << n {
                    v.push(HyperoctElement {
                        perm: p.clone(),
                        mask: ReversalMask::from_word(n, w),
                    });
                }
            }
            GroupElements::Hyperoct(v)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn perm(v: &[usize]) -> Permutation {
        Permutation::from_images(v.to_vec()).unwrap()
    }

    /// Independent phi: delete column i and row t(i) of the 0/1 matrix.
    fn phi_by_matrix(i: usize, t: &Permutation) -> Permutation {
        let n = t.len();
        // m[r][c] = 1 iff t(c) = r
        let m: Vec<Vec<u8>> = (0..n)
            .map(|r| (0..n).map(|c| (t.apply(c) == r) as u8).collect())
            .collect();
        let kept: Vec<Vec<u8>> = m
            .iter()
            .enumerate()
            .filter(|(r, _)| *r != t.apply(i))
            .map(|(_, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != i)
                    .map(|(_, x)| *x)
                    .collect()
            })
            .collect();
        let images = (0..n - 1)
            .map(|c| (0..n - 1).find(|&r| kept[r][c] == 1).unwrap())
            .collect();
        perm_from(images)
    }

    fn perm_from(v: Vec<usize>) -> Permutation {
        Permutation::from_images(v).unwrap()
    }

    #[test]
    fn sign_examples() {
        assert_eq!(sign_perm(&Permutation::identity(4)), 1);
        assert_eq!(sign_perm(&Permutation::adjacent(2, 0).unwrap()), -1);
        let three = Permutation::adjacent(3, 1)
            .unwrap()
            .compose(&Permutation::adjacent(3, 0).unwrap());
        assert_eq!(three.inversions(), 2);
        assert_eq!(sign_perm(&three), 1);
        assert_eq!(sign_reversal(&ReversalMask::zero(3)), 1);
        assert_eq!(sign_reversal(&ReversalMask::from_word(3, 0b010)), -1);
        assert_eq!(sign_reversal(&ReversalMask::from_word(3, 0b101)), 1);
        let swap =
            HyperoctElement::new(Permutation::adjacent(2, 0).unwrap(), ReversalMask::zero(2))
                .unwrap();
        assert_eq!(sign_hyperoct(&HyperoctElement::identity(2)), 1);
        assert_eq!(sign_hyperoct(&swap), -1);
        let mut flipped = swap.clone();
        flipped.mask = ReversalMask::from_word(2, 1);
        assert_eq!(sign_hyperoct(&flipped), 1);
    }

    #[test]
    fn phi_examples() {
        for i in 0..4 {
            assert!(phi(i, &Permutation::identity(4)).unwrap().is_identity());
        }
        let t = perm(&[1, 0, 2]);
        let p = phi(0, &t).unwrap();
        assert!(p.is_identity());
        assert_eq!(
            sign_perm(&p),
            (-1i64).pow(t.apply(0) as u32) * sign_perm(&t)
        );
        assert!(phi(3, &t).is_err());
        assert!(phi(0, &Permutation::identity(1)).is_err());
    }

    #[test]
    fn psi_examples() {
        assert!(psi(1, &ReversalMask::zero(1)).unwrap().is_empty());
        let a = ReversalMask::from_bits(vec![true, false, true]);
        assert_eq!(
            psi(2, &a).unwrap(),
            ReversalMask::from_bits(vec![true, true])
        );
        assert_eq!(sign_reversal(&a), -sign_reversal(&psi(1, &a).unwrap()));
        assert!(psi(0, &a).is_err());
    }

    #[test]
    fn lemma_phi_properties_up_to_five() {
        for n in 1..=5 {
            let all = all_permutations(n + 1);
            for i in 0..=n {
                let mut fibers: HashMap<Permutation, usize> = HashMap::new();
                for t in &all {
                    let p = phi(i, t).unwrap();
                    assert_eq!(p, phi_by_matrix(i, t));
                    let s = if (i + t.apply(i)) % 2 == 0 { 1 } else { -1 };
                    assert_eq!(sign_perm(&p), s * sign_perm(t));
                    // transposing the matrix swaps the roles of column i and row t(i)
                    assert_eq!(phi(t.apply(i), &t.inverse()).unwrap(), p.inverse());
                    assert_eq!(
                        phi(i, &t.inverse()).unwrap(),
                        phi(t.inverse().apply(i), t).unwrap().inverse()
                    );
                    *fibers.entry(p).or_default() += 1;
                }
                assert_eq!(fibers.len(), all_permutations(n).len());
                assert!(fibers.values().all(|&c| c == n + 1));
            }
        }
    }

    #[test]
    fn inverse_rule_needs_the_inverse_index() {
        // the variant indexed by t(i) breaks on a 3-cycle
        let t = perm(&[1, 2, 0]);
        let i = 0;
        assert_ne!(
            phi(i, &t.inverse()).unwrap(),
            phi(t.apply(i), &t).unwrap().inverse()
        );
        assert_eq!(
            phi(i, &t.inverse()).unwrap(),
            phi(t.inverse().apply(i), &t).unwrap().inverse()
        );
    }

    #[test]
    fn enumerate_sizes_and_caps() {
        assert_eq!(
            enumerate(1, GroupKind::Sym, DEFAULT_GROUP_CAP)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            enumerate(2, GroupKind::Rev, DEFAULT_GROUP_CAP)
                .unwrap()
                .len(),
            4
        );
        assert_eq!(
            enumerate(2, GroupKind::Hyperoct, DEFAULT_GROUP_CAP)
                .unwrap()
                .len(),
            8
        );
        assert!(matches!(
            enumerate(10, GroupKind::Sym, DEFAULT_GROUP_CAP),
            Err(Error::Resource(_))
        ));
        if let GroupElements::Hyperoct(v) = enumerate(3, GroupKind::Hyperoct, 100).unwrap() {
            let set: std::collections::HashSet<_> = v.iter().collect();
            assert_eq!(set.len(), 48);
        }
    }

    #[test]
    fn adjacent_word_rebuilds_permutation() {
        for p in all_permutations(5) {
            let w = p.adjacent_word();
            assert_eq!(w.len(), p.inversions());
            let mut acc = Permutation::identity(5);
            for &i in &w {
                acc = acc.compose(&Permutation::adjacent(5, i).unwrap());
            }
            assert_eq!(acc, p);
        }
    }

    fn hyper_elem() -> impl Strategy<Value = (HyperoctElement, HyperoctElement, HyperoctElement)> {
        (1usize..6).prop_flat_map(|n| {
            let one = (
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
                0u64..(1 << n),
            )
                .prop_map(move |(p, w)| {
                    HyperoctElement::new(perm_from(p), ReversalMask::from_word(n, w)).unwrap()
                });
            (one.clone(), one.clone(), one)
        })
    }

    proptest! {
        #[test]
        fn hyperoct_composition_is_extensional((a, b, c) in hyper_elem()) {
            let n = a.degree();
            for w in 0..1u64 << n {
                let v: Vec<bool> = (0..n).map(|k| w >> k & 1 == 1).collect();
                prop_assert_eq!(a.compose(&b).apply_point(&v), a.apply_point(&b.apply_point(&v)));
                prop_assert_eq!(a.inverse().apply_point(&a.apply_point(&v)), v.clone());
            }
            prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
            prop_assert_eq!(sign_hyperoct(&a.compose(&b)), sign_hyperoct(&a) * sign_hyperoct(&b));
            prop_assert_eq!(sign_perm(&a.perm.compose(&b.perm)), sign_perm(&a.perm) * sign_perm(&b.perm));
            prop_assert_eq!(sign_reversal(&a.mask.xor(&b.mask)), sign_reversal(&a.mask) * sign_reversal(&b.mask));
        }
    }
}
