//! Canonical labelling of decorated dual graphs by individualization and
//! refinement over vertices.
//!
//! Vertices are first colored by their local data (genus, extra legs,
//! labelled legs with exponents, self-edges with exponents), the coloring is
//! refined by neighbour colors, and every way of breaking the remaining ties
//! is explored. Each discrete coloring orders the vertices and yields an
//! integer encoding of the graph; the smallest encoding is the key. Because
//! every branch is explored, the number of branches reaching the minimum is
//! the order of the vertex-level automorphism group.

use super::{DecoratedGraph, DualGraph, LegLabel, Vertex};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Totally ordered isomorphism invariant of a decorated graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey(Vec<i64>);

impl CanonicalKey {
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    /// The canonical representative this key was computed from.
    pub fn to_graph(&self) -> DecoratedGraph {
        decode(&self.0)
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    /// The graph rebuilt from the key; isomorphic to the input.
    pub graph: DecoratedGraph,
    pub automorphisms: u64,
    /// `vertex_map[v]` is the id of input vertex `v` in `graph`.
    pub vertex_map: Vec<usize>,
}

pub fn canonical_form(dg: &DecoratedGraph) -> CanonicalForm {
    canonical_form_marked(dg, &vec![0; dg.graph().num_vertices()])
}

/// Canonical form where isomorphisms must also preserve the integer vertex
/// `marks` (used e.g. to pin the root of a tree).
pub fn canonical_form_marked(dg: &DecoratedGraph, marks: &[i64]) -> CanonicalForm {
    let local = LocalData::new(dg, marks);
    let colors = refine(&local, initial_colors(&local));
    let mut search = Search {
        local: &local,
        best: None,
        best_count: 0,
    };
    search.explore(colors);
    let (encoding, order) = search.best.expect("search visits at least one leaf");
    let kernel = kernel_order(&local);
    let mut vertex_map = vec![0; order.len()];
    for (pos, &v) in order.iter().enumerate() {
        vertex_map[v] = pos;
    }
    CanonicalForm {
        graph: decode(&encoding),
        key: CanonicalKey(encoding),
        automorphisms: search.best_count * kernel,
        vertex_map,
    }
}

struct LocalData {
    n: usize,
    /// Sortable invariant per vertex: mark, genus, extras, legs, loops.
    invariant: Vec<Vec<i64>>,
    /// Non-loop edges incident to each vertex: (neighbour, exp here, exp there).
    neighbours: Vec<Vec<(usize, i64, i64)>>,
    marks: Vec<i64>,
    genus: Vec<i64>,
    extras: Vec<i64>,
    legs: Vec<Vec<(i64, i64)>>,
    loops: Vec<Vec<(i64, i64)>>,
}

impl LocalData {
    fn new(dg: &DecoratedGraph, marks: &[i64]) -> Self {
        let g = dg.graph();
        let n = g.num_vertices();
        let mut legs = vec![Vec::new(); n];
        let mut loops = vec![Vec::new(); n];
        let mut neighbours = vec![Vec::new(); n];
        for h in 0..g.num_half_edges() {
            let v = g.vertex_of(h);
            let p = g.partner(h);
            let e = dg.exponent(h) as i64;
            if p == h {
                legs[v].push((g.label(h).map_or(-1, LegLabel::code), e));
            } else if g.vertex_of(p) == v {
                if h < p {
                    let f = dg.exponent(p) as i64;
                    loops[v].push((e.min(f), e.max(f)));
                }
            } else {
                neighbours[v].push((g.vertex_of(p), e, dg.exponent(p) as i64));
            }
        }
        for l in legs.iter_mut().chain(loops.iter_mut()) {
            l.sort_unstable();
        }
        let genus: Vec<i64> = g.vertices().iter().map(|v| v.genus as i64).collect();
        let extras: Vec<i64> = g.vertices().iter().map(|v| v.extra_legs as i64).collect();
        let invariant = (0..n)
            .map(|v| {
                let mut inv = vec![marks[v], genus[v], extras[v], neighbours[v].len() as i64];
                inv.push(legs[v].len() as i64);
                inv.extend(legs[v].iter().flat_map(|&(a, b)| [a, b]));
                inv.push(loops[v].len() as i64);
                inv.extend(loops[v].iter().flat_map(|&(a, b)| [a, b]));
                inv
            })
            .collect();
        LocalData {
            n,
            invariant,
            neighbours,
            marks: marks.to_vec(),
            genus,
            extras,
            legs,
            loops,
        }
    }
}

/// Dense ranks of `values`, ordered by value.
fn rank<T: Ord + Clone>(values: &[T]) -> Vec<usize> {
    let mut sorted: Vec<T> = values.to_vec();
    sorted.sort();
    sorted.dedup();
    values.iter().map(|x| sorted.binary_search(x).unwrap()).collect()
}

fn initial_colors(local: &LocalData) -> Vec<usize> {
    rank(&local.invariant)
}

fn refine(local: &LocalData, mut colors: Vec<usize>) -> Vec<usize> {
    let mut classes = count_classes(&colors);
    loop {
        let signatures: Vec<(usize, Vec<(usize, i64, i64)>)> = (0..local.n)
            .map(|v| {
                let mut s: Vec<_> = local.neighbours[v].iter().map(|&(u, a, b)| (colors[u], a, b)).collect();
                s.sort_unstable();
                (colors[v], s)
            })
            .collect();
        let next = rank(&signatures);
        let next_classes = count_classes(&next);
        if next_classes == classes {
            return next;
        }
        colors = next;
        classes = next_classes;
    }
}

fn count_classes(colors: &[usize]) -> usize {
    colors.iter().max().map_or(0, |m| m + 1)
}

struct Search<'a> {
    local: &'a LocalData,
    best: Option<(Vec<i64>, Vec<usize>)>,
    best_count: u64,
}

impl Search<'_> {
    fn explore(&mut self, colors: Vec<usize>) {
        let n = self.local.n;
        let mut sizes = vec![0usize; n];
        for &c in &colors {
            sizes[c] += 1;
        }
        let Some(cell) = (0..n).find(|&c| sizes[c] > 1) else {
            self.leaf(&colors);
            return;
        };
        for v in (0..n).filter(|&v| colors[v] == cell) {
            let split: Vec<usize> = (0..n)
                .map(|u| 2 * colors[u] + usize::from(u != v || colors[u] != cell))
                .collect();
            let next = refine(self.local, rank(&split));
            self.explore(next);
        }
    }

    fn leaf(&mut self, colors: &[usize]) {
        let mut order = vec![0; self.local.n];
        for (v, &c) in colors.iter().enumerate() {
            order[c] = v;
        }
        let enc = encode(self.local, colors, &order);
        match &self.best {
            Some((b, _)) if *b < enc => {}
            Some((b, _)) if *b == enc => self.best_count += 1,
            _ => {
                self.best = Some((enc, order));
                self.best_count = 1;
            }
        }
    }
}

fn encode(local: &LocalData, position: &[usize], order: &[usize]) -> Vec<i64> {
    let mut out = vec![local.n as i64];
    for &v in order {
        out.extend([local.marks[v], local.genus[v], local.extras[v]]);
        out.push(local.legs[v].len() as i64);
        out.extend(local.legs[v].iter().flat_map(|&(a, b)| [a, b]));
        out.push(local.loops[v].len() as i64);
        out.extend(local.loops[v].iter().flat_map(|&(a, b)| [a, b]));
    }
    let mut edges: Vec<[i64; 4]> = Vec::new();
    for v in 0..local.n {
        for &(u, a, b) in &local.neighbours[v] {
            let (pv, pu) = (position[v], position[u]);
            if pv < pu {
                edges.push([pv as i64, pu as i64, a, b]);
            }
        }
    }
    edges.sort_unstable();
    out.push(edges.len() as i64);
    out.extend(edges.iter().flatten());
    out
}

/// Automorphisms fixing every vertex: permutations of identical parallel
/// edges and self-edges, and flips of self-edges with equal exponents.
fn kernel_order(local: &LocalData) -> u64 {
    let mut order = 1u64;
    for v in 0..local.n {
        let mut parallel: BTreeMap<(usize, i64, i64), u64> = BTreeMap::new();
        for &(u, a, b) in &local.neighbours[v] {
            if v < u {
                *parallel.entry((u, a, b)).or_default() += 1;
            }
        }
        let mut loops: BTreeMap<(i64, i64), u64> = BTreeMap::new();
        for &l in &local.loops[v] {
            *loops.entry(l).or_default() += 1;
            if l.0 == l.1 {
                order *= 2;
            }
        }
        for k in parallel.values().chain(loops.values()) {
            order *= (1..=*k).product::<u64>();
        }
    }
    order
}

/// Rebuilds the canonical representative from an encoding.
fn decode(enc: &[i64]) -> DecoratedGraph {
    let mut it = enc.iter().copied();
    let mut next = || it.next().expect("truncated encoding");
    let n = next() as usize;
    let mut vertices = Vec::with_capacity(n);
    let mut attachment = Vec::new();
    let mut involution = Vec::new();
    let mut labels = Vec::new();
    let mut exponents = Vec::new();
    for v in 0..n {
        let _mark = next();
        let genus = next() as u32;
        let extra_legs = next() as u32;
        vertices.push(Vertex { genus, extra_legs });
        let n_legs = next();
        for _ in 0..n_legs {
            let code = next();
            let e = next() as i32;
            let h = attachment.len();
            attachment.push(v);
            involution.push(h);
            labels.push(Some(LegLabel::from_code(code)));
            exponents.push(e);
        }
        let n_loops = next();
        for _ in 0..n_loops {
            let a = next() as i32;
            let b = next() as i32;
            let h = attachment.len();
            attachment.extend([v, v]);
            involution.extend([h + 1, h]);
            labels.extend([None, None]);
            exponents.extend([a, b]);
        }
    }
    let n_edges = next();
    for _ in 0..n_edges {
        let (pa, pb, a, b) = (next() as usize, next() as usize, next() as i32, next() as i32);
        let h = attachment.len();
        attachment.extend([pa, pb]);
        involution.extend([h + 1, h]);
        labels.extend([None, None]);
        exponents.extend([a, b]);
    }
    DecoratedGraph::from_parts_unchecked(
        DualGraph::from_parts(vertices, attachment, involution, labels),
        exponents,
    )
}
