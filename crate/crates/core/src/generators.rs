//! Concrete cell systems: tuples on a simplicial complex, graph maps out of
//! cubes, and the two families of counterexamples.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chain_modules::{CellSystem, Chain, MapSystem, QVec, ValueNames};
use crate::error::{Error, Result};
use crate::exact_linalg::Scalar;
use crate::structure_maps::{hom_closure, Flags, Mode, MAX_HOM_DIM};

/// Default bound on the number of cells in any one degree.
pub const DEFAULT_CELL_CAP: usize = 2_000_000;

/// A simplicial complex given by its facets; every subset of a facet is a face.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetComplex {
    pub vertices: Vec<String>,
    /// vertex indices, each facet sorted
    pub facets: Vec<Vec<usize>>,
}

/// A simple undirected graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleGraph {
    pub vertices: Vec<String>,
    /// unordered pairs of vertex indices, stored with the smaller index first
    pub edges: Vec<(usize, usize)>,
}

fn label_of(v: &Value, field: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::invalid(format!(
            "{field}: vertex labels must be strings or numbers, got {other}"
        ))),
    }
}

fn parse_doc(text: &str) -> Result<serde_json::Map<String, Value>> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::invalid(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    match v {
        Value::Object(m) => Ok(m),
        _ => Err(Error::invalid("line 1: expected a JSON object")),
    }
}

fn parse_vertices(
    doc: &serde_json::Map<String, Value>,
) -> Result<(Vec<String>, BTreeMap<String, usize>)> {
    let arr = doc
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::invalid("field \"vertices\": missing or not an array"))?;
    let mut labels = Vec::new();
    let mut index = BTreeMap::new();
    for (k, v) in arr.iter().enumerate() {
        let l = label_of(v, &format!("vertices[{k}]"))?;
        if index.insert(l.clone(), k).is_some() {
            return Err(Error::invalid(format!(
                "vertices[{k}]: duplicate label {l:?}"
            )));
        }
        labels.push(l);
    }
    Ok((labels, index))
}

fn lookup(index: &BTreeMap<String, usize>, v: &Value, field: &str) -> Result<usize> {
    let l = label_of(v, field)?;
    index
        .get(&l)
        .copied()
        .ok_or_else(|| Error::invalid(format!("{field}: unknown vertex {l:?}")))
}

impl FacetComplex {
    pub fn new(vertices: Vec<String>, facets: Vec<Vec<usize>>) -> Result<Self> {
        let mut fs = Vec::new();
        for (k, f) in facets.into_iter().enumerate() {
            let set: BTreeSet<usize> = f.iter().copied().collect();
            if set.is_empty() {
                return Err(Error::invalid(format!("facets[{k}]: empty facet")));
            }
            if let Some(v) = set.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::invalid(format!(
                    "facets[{k}]: vertex index {v} out of range"
                )));
            }
            if set.len() != f.len() {
                return Err(Error::invalid(format!("facets[{k}]: repeated vertex")));
            }
            fs.push(set.into_iter().collect());
        }
        Ok(FacetComplex {
            vertices,
            facets: fs,
        })
    }

    /// `{"vertices": [...], "facets": [[...], ...]}` with facets listing labels.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc = parse_doc(text)?;
        let (labels, index) = parse_vertices(&doc)?;
        let arr = doc
            .get("facets")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::invalid("field \"facets\": missing or not an array"))?;
        let mut facets = Vec::new();
        for (k, f) in arr.iter().enumerate() {
            let vs = f
                .as_array()
                .ok_or_else(|| Error::invalid(format!("facets[{k}]: expected an array")))?;
            facets.push(
                vs.iter()
                    .enumerate()
                    .map(|(j, v)| lookup(&index, v, &format!("facets[{k}][{j}]")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        FacetComplex::new(labels, facets)
    }

    pub fn is_face(&self, s: &BTreeSet<usize>) -> bool {
        self.facets
            .iter()
            .any(|f| s.iter().all(|v| f.binary_search(v).is_ok()))
    }

    /// Faces of each dimension, for brute-force homology.
    pub fn faces(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for f in &self.facets {
            for mask in 1u64..1 << f.len() {
                out.insert(
                    (0..f.len())
                        .filter(|k| mask >> k & 1 == 1)
                        .map(|k| f[k])
                        .collect(),
                );
            }
        }
        out
    }

    fn names(&self) -> ValueNames {
        ValueNames::Names(self.vertices.clone())
    }
}

impl SimpleGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut es = BTreeSet::new();
        for (k, (a, b)) in edges.into_iter().enumerate() {
            if a >= vertices.len() || b >= vertices.len() {
                return Err(Error::invalid(format!(
                    "edges[{k}]: vertex index out of range"
                )));
            }
            if a == b {
                return Err(Error::invalid(format!("edges[{k}]: loops are not allowed")));
            }
            es.insert((a.min(b), a.max(b)));
        }
        Ok(SimpleGraph {
            vertices,
            edges: es.into_iter().collect(),
        })
    }

    /// `{"vertices": [...], "edges": [[u, v], ...]}` with edges listing labels.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc = parse_doc(text)?;
        let (labels, index) = parse_vertices(&doc)?;
        let arr = doc
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::invalid("field \"edges\": missing or not an array"))?;
        let mut edges = Vec::new();
        for (k, e) in arr.iter().enumerate() {
            match e.as_array().map(Vec::as_slice) {
                Some([a, b]) => edges.push((
                    lookup(&index, a, &format!("edges[{k}][0]"))?,
                    lookup(&index, b, &format!("edges[{k}][1]"))?,
                )),
                _ => return Err(Error::invalid(format!("edges[{k}]: expected a pair"))),
            }
        }
        SimpleGraph::new(labels, edges)
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        SimpleGraph::new((1..=n).map(|k| k.to_string()).collect(), edges).expect("valid")
    }

    pub fn cycle(n: usize) -> Self {
        let edges = (0..n).map(|a| (a, (a + 1) % n)).collect();
        SimpleGraph::new((1..=n).map(|k| k.to_string()).collect(), edges).expect("valid")
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.vertices.len();
        let mut adj = vec![vec![false; n]; n];
        for (k, row) in adj.iter_mut().enumerate() {
            row[k] = true;
        }
        for &(a, b) in &self.edges {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        adj
    }
}

fn check_degree(max_deg: i32, cap: i32) -> Result<()> {
    if max_deg > cap {
        return Err(Error::resource(format!(
            "degree {max_deg} exceeds the limit {cap}"
        )));
    }
    Ok(())
}

/// All tuples `(v_0, …, v_n)` whose vertex set is a face, `n = -1..=max_deg`,
/// with transpositions acting by permuting entries.
pub fn sym_a(k: &FacetComplex, max_deg: i32, cell_cap: usize) -> Result<MapSystem> {
    check_degree(max_deg, 12)?;
    let mut tables = Vec::new();
    for n in -1..=max_deg {
        let len = (n + 1) as usize;
        let bound: f64 = k
            .facets
            .iter()
            .map(|f| (f.len() as f64).powi(len as i32))
            .sum();
        if bound > cell_cap as f64 {
            return Err(Error::resource(format!(
                "degree {n} of Sym_a has more than {cell_cap} cells"
            )));
        }
        let mut set = BTreeSet::new();
        for f in &k.facets {
            let mut t = vec![0usize; len];
            loop {
                set.insert(t.iter().map(|&i| f[i] as u32).collect::<Vec<u32>>());
                let Some(p) = (0..len).rev().find(|&p| t[p] + 1 < f.len()) else {
                    break;
                };
                t[p] += 1;
                for x in &mut t[p + 1..] {
                    *x = 0;
                }
            }
        }
        tables.push(set.into_iter().collect());
    }
    MapSystem::new(
        Mode::Simplicial,
        Flags::T,
        -1,
        k.names(),
        Vec::new(),
        tables,
    )
}

/// Tuples that are weakly increasing for the vertex order `order` (a list of
/// vertex indices, smallest first), without symmetries.
pub fn or_a(k: &FacetComplex, order: &[usize], max_deg: i32, cell_cap: usize) -> Result<MapSystem> {
    check_degree(max_deg, 12)?;
    let mut rank = vec![usize::MAX; k.vertices.len()];
    for (r, &v) in order.iter().enumerate() {
        if v >= rank.len() || rank[v] != usize::MAX {
            return Err(Error::invalid(
                "vertex order must list every vertex exactly once",
            ));
        }
        rank[v] = r;
    }
    if rank.contains(&usize::MAX) {
        return Err(Error::invalid(
            "vertex order must list every vertex exactly once",
        ));
    }
    let sym = sym_a(k, max_deg, cell_cap)?;
    let tables = (-1..=max_deg)
        .map(|n| {
            (0..sym.num_cells(n))
                .map(|c| sym.table(n, c).to_vec())
                .filter(|t| {
                    t.windows(2)
                        .all(|w| rank[w[0] as usize] <= rank[w[1] as usize])
                })
                .collect()
        })
        .collect();
    MapSystem::new(
        Mode::Simplicial,
        Flags::NONE,
        -1,
        k.names(),
        Vec::new(),
        tables,
    )
}

/// Cell-level inclusion of a sub-system given on the same tables.
pub fn inclusion(sub: &MapSystem, sup: &MapSystem) -> Result<Vec<Vec<usize>>> {
    (sub.min_degree()..=sub.max_degree())
        .map(|n| {
            (0..sub.num_cells(n))
                .map(|c| {
                    sup.find(n, sub.table(n, c)).ok_or_else(|| {
                        Error::contract(format!("cell {} has no image", sub.label(n, c)))
                    })
                })
                .collect()
        })
        .collect()
}

/// Orders in which the cube's vertices are assigned during enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VisitOrder {
    Gray,
    Binary,
}

/// Graph maps `I^n -> G` for `n = 0..=max_deg`, with every cube symmetry.
pub fn n1_graph(g: &SimpleGraph, max_deg: i32, cell_cap: usize) -> Result<MapSystem> {
    n1_graph_with_order(g, max_deg, cell_cap, VisitOrder::Gray)
}

pub fn n1_graph_with_order(
    g: &SimpleGraph,
    max_deg: i32,
    cell_cap: usize,
    order: VisitOrder,
) -> Result<MapSystem> {
    check_degree(max_deg, 6)?;
    let adj = g.adjacency();
    let mut tables = Vec::new();
    for n in 0..=max_deg {
        tables.push(cube_maps(&adj, n as usize, cell_cap, order)?);
    }
    MapSystem::new(
        Mode::Cubical,
        Flags::RT,
        0,
        ValueNames::Names(g.vertices.clone()),
        Vec::new(),
        tables,
    )
}

fn cube_maps(adj: &[Vec<bool>], n: usize, cap: usize, order: VisitOrder) -> Result<Vec<Vec<u32>>> {
    let size = 1usize << n;
    let seq: Vec<usize> = match order {
        VisitOrder::Gray => (0..size).map(|k| k ^ (k >> 1)).collect(),
        VisitOrder::Binary => (0..size).collect(),
    };
    let mut pos = vec![0usize; size];
    for (k, &v) in seq.iter().enumerate() {
        pos[v] = k;
    }
    // neighbors assigned before each step
    let earlier: Vec<Vec<usize>> = seq
        .iter()
        .map(|&v| {
            (0..n)
                .map(|b| v ^ (1 << b))
                .filter(|&w| pos[w] < pos[v])
                .collect()
        })
        .collect();
    let nv = adj.len();
    let mut out = Vec::new();
    let mut f = vec![0u32; size];
    let mut choice = vec![0usize; size];
    let mut step = 0usize;
    if nv == 0 {
        return Ok(out);
    }
    loop {
        // try the current choice at this step
        if choice[step] < nv {
            let v = seq[step];
            let x = choice[step];
            if earlier[step].iter().all(|&w| adj[x][f[w] as usize]) {
                f[v] = x as u32;
                if step + 1 == size {
                    out.push(f.clone());
                    if out.len() > cap {
                        return Err(Error::resource(format!(
                            "degree {n} has more than {cap} graph maps"
                        )));
                    }
                    choice[step] += 1;
                } else {
                    step += 1;
                    choice[step] = 0;
                }
            } else {
                choice[step] += 1;
            }
        } else {
            if step == 0 {
                break;
            }
            step -= 1;
            choice[step] += 1;
        }
    }
    Ok(out)
}

/// `{0,1}^{n+1}` modulo the global flip, `n = 0..=max_deg`, with transpositions.
pub fn counterexample_x(max_deg: i32) -> Result<MapSystem> {
    check_degree(max_deg, 16)?;
    let tables = (0..=max_deg)
        .map(|n| {
            let len = n as usize + 1;
            (0..1u32 << len)
                .map(|w| (0..len).map(|k| w >> (len - 1 - k) & 1).collect())
                .collect()
        })
        .collect();
    MapSystem::new(
        Mode::Simplicial,
        Flags::T,
        0,
        ValueNames::Names(vec!["0".into(), "1".into()]),
        vec![vec![1, 0]],
        tables,
    )
}

/// The degree-3 cycle `class(0110) + class(0101)` of [`counterexample_x`].
pub fn witness_cycle_a(x: &MapSystem) -> Result<Chain> {
    let a = x
        .find(3, &[0, 1, 1, 0])
        .ok_or_else(|| Error::invalid("the system has no degree 3"))?;
    let b = x.find(3, &[0, 1, 0, 1]).expect("same degree");
    Ok(Chain::new(
        3,
        QVec::from_pairs([(a, Scalar::one()), (b, Scalar::one())]),
    ))
}

/// Which symmetries the cube category of a Y-system carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum YKind {
    T,
    R,
    Rt,
}

impl YKind {
    pub fn flags(&self) -> Flags {
        match self {
            YKind::T => Flags::T,
            YKind::R => Flags::R,
            YKind::Rt => Flags::RT,
        }
    }

    /// Target cube dimension and the automorphism identified with the identity.
    fn target(&self) -> (usize, Vec<u32>) {
        match self {
            // swap the two coordinates of [1]^2
            YKind::T => (2, vec![0b00, 0b10, 0b01, 0b11]),
            YKind::R | YKind::Rt => (1, vec![1, 0]),
        }
    }
}

/// Maps `[1]^k -> [1]^m` of the cube category, identified up to
/// postcomposition with the fixed automorphism.
pub fn counterexample_y(kind: YKind, max_deg: i32) -> Result<MapSystem> {
    if max_deg < 0 {
        return Err(Error::invalid("degree must be nonnegative"));
    }
    check_degree(max_deg, MAX_HOM_DIM as i32 - 1)?;
    let (m, aut) = kind.target();
    let bound = (max_deg as usize).max(m);
    let homs = hom_closure(kind.flags(), m, bound)?;
    let tables = homs
        .into_iter()
        .take(max_deg as usize + 1)
        .map(|fs| fs.into_iter().map(|f| f.table().to_vec()).collect())
        .collect();
    MapSystem::new(
        Mode::Cubical,
        kind.flags(),
        0,
        ValueNames::Bits(m),
        vec![aut],
        tables,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain_modules::{check_identities_on_cells, free_linear, LinearSystem};
    use crate::structure_maps::Letter;

    fn edge() -> FacetComplex {
        FacetComplex::new(vec!["1".into(), "2".into()], vec![vec![0, 1]]).unwrap()
    }

    fn nondegenerate(sys: &MapSystem, n: i32) -> usize {
        let f = free_linear(sys);
        (0..sys.num_cells(n))
            .filter(|&c| !f.is_degenerate(n, c))
            .count()
    }

    #[test]
    fn parse_with_diagnostics() {
        let k = FacetComplex::from_json(
            r#"{"vertices": ["a", "b", 3], "facets": [["a", "b"], ["b", 3]]}"#,
        )
        .unwrap();
        assert_eq!(k.facets, vec![vec![0, 1], vec![1, 2]]);
        let e =
            FacetComplex::from_json(r#"{"vertices": ["a"], "facets": [["a", "z"]]}"#).unwrap_err();
        assert!(e.to_string().contains("facets[0][1]"), "{e}");
        let e = FacetComplex::from_json("{\n \"vertices\": [1,\n").unwrap_err();
        assert!(e.to_string().contains("line"), "{e}");
        let g = SimpleGraph::from_json(r#"{"vertices": [1, 2], "edges": [[1, 2]]}"#).unwrap();
        assert_eq!(g.edges, vec![(0, 1)]);
        let e = SimpleGraph::from_json(r#"{"vertices": [1], "edges": [[1, 1]]}"#).unwrap_err();
        assert!(e.to_string().contains("edges[0]"), "{e}");
        assert!(SimpleGraph::from_json(r#"{"vertices": [1, 2], "edges": [[1]]}"#).is_err());
    }

    #[test]
    fn tuple_systems() {
        let pt = FacetComplex::new(vec!["p".into()], vec![vec![0]]).unwrap();
        let s = sym_a(&pt, 4, 1000).unwrap();
        assert!((-1..=4).all(|n| s.num_cells(n) == 1));
        assert_eq!(s.label(-1, 0), "()");
        let s = sym_a(&edge(), 3, 1000).unwrap();
        let cells: Vec<String> = (0..4).map(|c| s.label(1, c)).collect();
        assert_eq!(cells, ["(1,1)", "(1,2)", "(2,1)", "(2,2)"]);
        let o = or_a(&edge(), &[0, 1], 3, 1000).unwrap();
        assert_eq!(o.num_cells(1), 3);
        let inc = inclusion(&o, &s).unwrap();
        // the inclusion commutes with faces and degeneracies
        for n in 0..=3 {
            for c in 0..o.num_cells(n) {
                for i in 0..=n as usize {
                    for l in [Letter::Face(i), Letter::Degeneracy(i)] {
                        if let Some(oc) = o.act(l, n, c) {
                            let dom = l.domain(Mode::Simplicial, n).unwrap();
                            assert_eq!(
                                inc[(dom + 1) as usize][oc],
                                s.act(l, n, inc[(n + 1) as usize][c]).unwrap()
                            );
                        }
                    }
                }
            }
        }
        assert!(matches!(sym_a(&edge(), 30, 1000), Err(Error::Resource(_))));
        assert!(matches!(sym_a(&edge(), 11, 1000), Err(Error::Resource(_))));
    }

    #[test]
    fn graph_maps() {
        let k2 = SimpleGraph::complete(2);
        let n = n1_graph(&k2, 2, 1000).unwrap();
        assert_eq!((n.num_cells(0), n.num_cells(1), n.num_cells(2)), (2, 4, 16));
        for g in [
            SimpleGraph::cycle(5),
            SimpleGraph::complete(4),
            SimpleGraph::cycle(8),
        ] {
            for d in 0..=3 {
                let a = cube_maps(&g.adjacency(), d, 1 << 24, VisitOrder::Gray).unwrap();
                let mut b = cube_maps(&g.adjacency(), d, 1 << 24, VisitOrder::Binary).unwrap();
                let mut a = a;
                a.sort();
                b.sort();
                assert_eq!(a, b);
            }
        }
        assert!(matches!(
            n1_graph(&SimpleGraph::complete(3), 3, 100),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn graph_map_oracle() {
        // brute force over all assignments of the square's vertices into C_5
        let c5 = SimpleGraph::cycle(5);
        let adj = c5.adjacency();
        let mut count = 0;
        for w in 0..625u32 {
            let f: Vec<usize> = (0..4).map(|k| (w / 5u32.pow(k)) as usize % 5).collect();
            let ok = [(0, 1), (0, 2), (1, 3), (2, 3)]
                .iter()
                .all(|&(a, b)| adj[f[a]][f[b]]);
            count += ok as usize;
        }
        assert_eq!(n1_graph(&c5, 2, 10_000).unwrap().num_cells(2), count);
    }

    #[test]
    fn flip_quotient() {
        let x = counterexample_x(4).unwrap();
        assert_eq!(
            (0..=3).map(|n| x.num_cells(n)).collect::<Vec<_>>(),
            [1, 2, 4, 8]
        );
        assert_eq!(x.label(1, 1), "(0,1)");
        let c = x.find(3, &[0, 1, 1, 0]).unwrap();
        let t = x.act(Letter::Transposition(2), 3, c).unwrap();
        assert_eq!(t, x.find(3, &[0, 1, 0, 1]).unwrap());
        let e = x.find(1, &[0, 1]).unwrap();
        assert_eq!(x.act(Letter::Face(0), 1, e), x.find(0, &[0]));
        assert_eq!(x.find(2, &[1, 0, 0]), x.find(2, &[0, 1, 1]));
        assert!(check_identities_on_cells(&x, None).passed());
        let a = witness_cycle_a(&x).unwrap();
        assert_eq!(a.coeffs.nnz(), 2);
    }

    #[test]
    fn y_systems() {
        let yr = counterexample_y(YKind::R, 4).unwrap();
        let counts: Vec<usize> = (0..=4).map(|n| nondegenerate(&yr, n)).collect();
        assert_eq!(counts, [1, 1, 4, 24, 176]);
        assert_eq!(yr.num_cells(0), 1);
        // the four degree-2 classes are max composed with reversals
        let f = free_linear(&yr);
        let labels: Vec<String> = (0..yr.num_cells(2))
            .filter(|&c| !f.is_degenerate(2, c))
            .map(|c| yr.label(2, c))
            .collect();
        assert_eq!(labels.len(), 4);
        for y in [YKind::T, YKind::R, YKind::Rt] {
            let s = counterexample_y(y, 3).unwrap();
            let rep = check_identities_on_cells(&s, None);
            assert!(rep.passed(), "{y:?}: {:?}", rep.failures.first());
        }
        assert!(matches!(
            counterexample_y(YKind::R, 6),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn tuple_and_graph_systems_satisfy_relations() {
        let tri = FacetComplex::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let s = sym_a(&tri, 3, 10_000).unwrap();
        assert!(check_identities_on_cells(&s, None).passed());
        let o = or_a(&tri, &[0, 1, 2], 3, 10_000).unwrap();
        assert!(check_identities_on_cells(&o, None).passed());
        let n = n1_graph(&SimpleGraph::cycle(5), 2, 10_000).unwrap();
        let rep = check_identities_on_cells(&n, None);
        assert!(rep.passed(), "{:?}", rep.failures.first());
        assert!(rep.instances > 50, "{}", rep.instances);
    }
}
