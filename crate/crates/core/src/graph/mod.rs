//! Dual graphs of nodal curves.
//!
//! A [`DualGraph`] is a set of vertices (irreducible components, each with a
//! genus), a set of half-edges attached to vertices, and an involution on the
//! half-edges. Fixed points of the involution are legs (marked points), the
//! two-element orbits are edges (nodes). Legs that survive into the ambient
//! moduli space carry a [`LegLabel`]; legs that are going to be forgotten
//! ("extra" legs) are stored as an unindexed count on their vertex, so that
//! graphs differing only by a permutation of extra legs are literally equal.

mod canon;
mod decorated;
mod json;
mod tree;

pub use canon::{canonical_form, canonical_form_marked, CanonicalForm, CanonicalKey};
pub use decorated::{DecoratedGraph, GraphBuilder};
pub use json::{DecoratedGraphJson, HalfEdgeJson, LegJson, VertexJson};
pub use tree::RootedTreeView;

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

/// Label of a leg that is a marked point of the ambient moduli space.
///
/// Frozen legs sort before regular legs; within a kind, by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LegLabel {
    Frozen(u32),
    Regular(u32),
}

impl LegLabel {
    pub fn index(self) -> u32 {
        match self {
            LegLabel::Frozen(i) | LegLabel::Regular(i) => i,
        }
    }

    pub fn is_frozen(self) -> bool {
        matches!(self, LegLabel::Frozen(_))
    }

    pub fn is_regular(self) -> bool {
        matches!(self, LegLabel::Regular(_))
    }

    /// Injective integer code respecting the `Ord` impl.
    pub(crate) fn code(self) -> i64 {
        match self {
            LegLabel::Frozen(i) => 2 * i as i64,
            LegLabel::Regular(i) => 2 * i as i64 + 1,
        }
    }

    pub(crate) fn from_code(code: i64) -> Self {
        let i = (code / 2) as u32;
        if code % 2 == 0 {
            LegLabel::Frozen(i)
        } else {
            LegLabel::Regular(i)
        }
    }
}

impl fmt::Display for LegLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LegLabel::Frozen(i) => write!(f, "V{i}"),
            LegLabel::Regular(i) => write!(f, "U{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub genus: u32,
    /// Number of extra (to-be-forgotten) legs on this vertex.
    pub extra_legs: u32,
}

impl Vertex {
    pub fn new(genus: u32) -> Self {
        Vertex { genus, extra_legs: 0 }
    }
}

/// A violated [`DualGraph`] invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoVertices,
    LengthMismatch,
    DanglingHalfEdge { half_edge: usize, vertex: usize },
    InvolutionOutOfRange { half_edge: usize },
    NotAnInvolution { half_edge: usize },
    Disconnected,
    UnlabelledLeg { half_edge: usize },
    LabelledEdge { half_edge: usize },
    DuplicateLabel(LegLabel),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "no vertices"),
            Violation::LengthMismatch => write!(f, "half-edge tables have different lengths"),
            Violation::DanglingHalfEdge { half_edge, vertex } => {
                write!(f, "half-edge {half_edge} attached to missing vertex {vertex}")
            }
            Violation::InvolutionOutOfRange { half_edge } => {
                write!(f, "involution maps half-edge {half_edge} out of range")
            }
            Violation::NotAnInvolution { half_edge } => {
                write!(f, "not an involution at half-edge {half_edge}")
            }
            Violation::Disconnected => write!(f, "disconnected"),
            Violation::UnlabelledLeg { half_edge } => write!(f, "leg {half_edge} has no label"),
            Violation::LabelledEdge { half_edge } => {
                write!(f, "half-edge {half_edge} is part of an edge but carries a leg label")
            }
            Violation::DuplicateLabel(l) => write!(f, "duplicate leg label {l}"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("invalid dual graph: {}", display_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("graph is not a tree")]
    NotATree,
    #[error("root vertex {0} out of range")]
    BadRoot(usize),
    #[error("frozen leg {0} is not attached to the root")]
    FrozenOffRoot(LegLabel),
}

fn display_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// An undecorated dual graph. Half-edges and vertices are identified by their
/// index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualGraph {
    vertices: Vec<Vertex>,
    attachment: Vec<usize>,
    involution: Vec<usize>,
    labels: Vec<Option<LegLabel>>,
}

impl DualGraph {
    /// Assemble a graph without checking any invariant. Use [`DualGraph::validate`]
    /// to inspect the result.
    pub fn from_parts(
        vertices: Vec<Vertex>,
        attachment: Vec<usize>,
        involution: Vec<usize>,
        labels: Vec<Option<LegLabel>>,
    ) -> Self {
        DualGraph {
            vertices,
            attachment,
            involution,
            labels,
        }
    }

    pub fn new(
        vertices: Vec<Vertex>,
        attachment: Vec<usize>,
        involution: Vec<usize>,
        labels: Vec<Option<LegLabel>>,
    ) -> Result<Self, GraphError> {
        let g = Self::from_parts(vertices, attachment, involution, labels);
        let violations = g.validate();
        if violations.is_empty() {
            Ok(g)
        } else {
            Err(GraphError::Invalid(violations))
        }
    }

    /// Every violated invariant; empty means the graph is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n_h = self.attachment.len();
        if self.vertices.is_empty() {
            out.push(Violation::NoVertices);
        }
        if self.involution.len() != n_h || self.labels.len() != n_h {
            out.push(Violation::LengthMismatch);
            return out;
        }
        for (h, &v) in self.attachment.iter().enumerate() {
            if v >= self.vertices.len() {
                out.push(Violation::DanglingHalfEdge {
                    half_edge: h,
                    vertex: v,
                });
            }
        }
        let mut involution_ok = true;
        for (h, &p) in self.involution.iter().enumerate() {
            if p >= n_h {
                out.push(Violation::InvolutionOutOfRange { half_edge: h });
                involution_ok = false;
            } else if self.involution[p] != h {
                out.push(Violation::NotAnInvolution { half_edge: h });
                involution_ok = false;
            }
        }
        let mut seen = BTreeSet::new();
        for h in 0..n_h {
            let fixed = self.involution[h] == h;
            match (fixed, self.labels[h]) {
                (true, None) => out.push(Violation::UnlabelledLeg { half_edge: h }),
                (false, Some(_)) => out.push(Violation::LabelledEdge { half_edge: h }),
                (true, Some(l))
                    if !seen.insert(l) => {
                        out.push(Violation::DuplicateLabel(l));
                    }
                _ => {}
            }
        }
        let attach_ok = self.attachment.iter().all(|&v| v < self.vertices.len());
        if involution_ok && attach_ok && !self.vertices.is_empty() && !self.is_connected() {
            out.push(Violation::Disconnected);
        }
        out
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for h in 0..self.attachment.len() {
            let p = self.involution[h];
            if p != h {
                adj[self.attachment[h]].push(self.attachment[p]);
            }
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.attachment.len()
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.attachment[h]
    }

    pub fn partner(&self, h: usize) -> usize {
        self.involution[h]
    }

    pub fn is_leg(&self, h: usize) -> bool {
        self.involution[h] == h
    }

    pub fn label(&self, h: usize) -> Option<LegLabel> {
        self.labels[h]
    }

    /// Half-edges attached to `v`, in increasing order.
    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.attachment.len())
            .filter(|&h| self.attachment[h] == v)
            .collect()
    }

    /// |H_v|, counting extra legs.
    pub fn valence(&self, v: usize) -> usize {
        self.attachment.iter().filter(|&&w| w == v).count() + self.vertices[v].extra_legs as usize
    }

    /// Edges as sorted half-edge pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.attachment.len())
            .filter(|&h| self.involution[h] > h)
            .map(|h| (h, self.involution[h]))
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.involution.iter().enumerate().filter(|(h, &p)| p > *h).count()
    }

    /// Labelled legs as `(half-edge, label)`, sorted by label.
    pub fn legs(&self) -> Vec<(usize, LegLabel)> {
        let mut out: Vec<_> = self
            .labels
            .iter()
            .enumerate()
            .filter_map(|(h, l)| l.map(|l| (h, l)))
            .collect();
        out.sort_by_key(|&(_, l)| l);
        out
    }

    pub fn leg_of(&self, label: LegLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == Some(label))
    }

    pub fn total_extra_legs(&self) -> u32 {
        self.vertices.iter().map(|v| v.extra_legs).sum()
    }

    /// 1 + |E| − |V| + Σ g_v.
    pub fn genus(&self) -> u32 {
        let sum: i64 = self.vertices.iter().map(|v| v.genus as i64).sum();
        (1 + self.num_edges() as i64 - self.vertices.len() as i64 + sum) as u32
    }

    pub fn vertex_is_stable(&self, v: usize) -> bool {
        2 * self.vertices[v].genus as i64 - 2 + self.valence(v) as i64 > 0
    }

    pub fn is_stable(&self) -> bool {
        (0..self.vertices.len()).all(|v| self.vertex_is_stable(v))
    }

    /// Stability of `v` once its extra legs are deleted.
    pub fn vertex_is_stable_without_extras(&self, v: usize) -> bool {
        let valence = self.valence(v) - self.vertices[v].extra_legs as usize;
        2 * self.vertices[v].genus as i64 - 2 + valence as i64 > 0
    }

    /// Complex dimension 3g_v − 3 + |H_v| of the vertex moduli space.
    pub fn vertex_dimension(&self, v: usize) -> i64 {
        3 * self.vertices[v].genus as i64 - 3 + self.valence(v) as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_vertex(genus: u32, legs: u32) -> DualGraph {
        let labels = (1..=legs).map(|i| Some(LegLabel::Regular(i))).collect();
        DualGraph::new(
            vec![Vertex::new(genus)],
            vec![0; legs as usize],
            (0..legs as usize).collect(),
            labels,
        )
        .unwrap()
    }

    #[test]
    fn genus_one_vertex_with_three_legs_is_valid() {
        let g = single_vertex(1, 3);
        assert!(g.validate().is_empty());
        assert_eq!(g.genus(), 1);
    }

    #[test]
    fn broken_involution_is_reported() {
        // h0 -> h1 but h1 -> h2
        let g = DualGraph::from_parts(
            vec![Vertex::new(0)],
            vec![0, 0, 0],
            vec![1, 2, 0],
            vec![None, None, None],
        );
        let v = g.validate();
        assert!(v.contains(&Violation::NotAnInvolution { half_edge: 0 }));
        assert!(v.iter().any(|x| x.to_string().contains("not an involution")));
    }

    #[test]
    fn two_unconnected_vertices_are_disconnected() {
        let g = DualGraph::from_parts(
            vec![Vertex::new(1), Vertex::new(1)],
            vec![0, 1],
            vec![0, 1],
            vec![Some(LegLabel::Regular(1)), Some(LegLabel::Regular(2))],
        );
        assert_eq!(g.validate(), vec![Violation::Disconnected]);
    }

    #[test]
    fn labels_must_match_fixed_points() {
        let g = DualGraph::from_parts(
            vec![Vertex::new(0)],
            vec![0, 0, 0],
            vec![1, 0, 2],
            vec![Some(LegLabel::Frozen(1)), None, None],
        );
        let v = g.validate();
        assert!(v.contains(&Violation::LabelledEdge { half_edge: 0 }));
        assert!(v.contains(&Violation::UnlabelledLeg { half_edge: 2 }));
    }

    #[test]
    fn genus_formula() {
        // genus-0 vertex with a self-edge
        let g = DualGraph::new(
            vec![Vertex::new(0)],
            vec![0, 0, 0],
            vec![1, 0, 2],
            vec![None, None, Some(LegLabel::Regular(1))],
        )
        .unwrap();
        assert_eq!(g.genus(), 1);

        // 4 vertices, 6 edges: the picture with genera g1..g4
        let genera = [2u32, 0, 1, 3];
        let mut b = GraphBuilder::new();
        let v: Vec<_> = genera.iter().map(|&g| b.add_vertex(g)).collect();
        b.add_edge(v[0], 0, v[0], 0);
        b.add_edge(v[0], 0, v[1], 0);
        b.add_edge(v[1], 0, v[2], 0);
        b.add_edge(v[1], 0, v[3], 0);
        b.add_edge(v[2], 0, v[2], 0);
        b.add_edge(v[2], 0, v[3], 0);
        let g = b.build().unwrap();
        assert_eq!(g.graph().genus(), 3 + genera.iter().sum::<u32>());
    }

    #[test]
    fn stability_by_valence() {
        assert!(single_vertex(0, 3).is_stable());
        assert!(!single_vertex(0, 2).is_stable());
        assert!(single_vertex(1, 1).is_stable());
    }
}
