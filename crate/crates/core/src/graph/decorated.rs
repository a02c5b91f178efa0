use super::{canonical_form, CanonicalKey, DualGraph, GraphError, LegLabel, Vertex};

/// A dual graph together with an integer ψ-exponent on every half-edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DecoratedGraph {
    graph: DualGraph,
    exponents: Vec<i32>,
}

impl DecoratedGraph {
    pub fn new(graph: DualGraph, exponents: Vec<i32>) -> Result<Self, GraphError> {
        let mut violations = graph.validate();
        if exponents.len() != graph.num_half_edges() {
            violations.push(super::Violation::LengthMismatch);
        }
        if violations.is_empty() {
            Ok(DecoratedGraph { graph, exponents })
        } else {
            Err(GraphError::Invalid(violations))
        }
    }

    /// The undecorated graph with all exponents zero.
    pub fn undecorated(graph: DualGraph) -> Result<Self, GraphError> {
        let n = graph.num_half_edges();
        Self::new(graph, vec![0; n])
    }

    pub(crate) fn from_parts_unchecked(graph: DualGraph, exponents: Vec<i32>) -> Self {
        DecoratedGraph { graph, exponents }
    }

    pub fn graph(&self) -> &DualGraph {
        &self.graph
    }

    pub fn exponents(&self) -> &[i32] {
        &self.exponents
    }

    pub fn exponent(&self, h: usize) -> i32 {
        self.exponents[h]
    }

    /// Sum of the exponents on the half-edges of `v`.
    pub fn vertex_psi_degree(&self, v: usize) -> i64 {
        (0..self.exponents.len())
            .filter(|&h| self.graph.vertex_of(h) == v)
            .map(|h| self.exponents[h] as i64)
            .sum()
    }

    pub fn psi_degree(&self) -> i64 {
        self.exponents.iter().map(|&e| e as i64).sum()
    }

    /// Cohomological degree (complex codimension) of the class ξ_*(∏ψ^q):
    /// ψ-degree plus number of edges.
    pub fn degree(&self) -> i64 {
        self.psi_degree() + self.graph.num_edges() as i64
    }

    pub fn has_negative_exponent(&self) -> bool {
        self.exponents.iter().any(|&e| e < 0)
    }

    pub fn is_psi_free(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// True when some vertex carries more ψ-degree than its moduli space has
    /// dimensions.
    pub fn exceeds_vertex_dimension(&self) -> bool {
        (0..self.graph.num_vertices()).any(|v| self.vertex_psi_degree(v) > self.graph.vertex_dimension(v))
    }

    pub fn leg_exponent(&self, label: LegLabel) -> Option<i32> {
        self.graph.leg_of(label).map(|h| self.exponents[h])
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        canonical_form(self).key
    }

    pub fn automorphism_order(&self) -> u64 {
        canonical_form(self).automorphisms
    }

    pub fn canonicalize(&self) -> DecoratedGraph {
        canonical_form(self).graph
    }
}

/// Mutable assembly area for decorated graphs, also used for graph surgery
/// (splitting and contracting vertices).
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    vertices: Vec<Vertex>,
    attachment: Vec<usize>,
    involution: Vec<usize>,
    labels: Vec<Option<LegLabel>>,
    exponents: Vec<i32>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Start from an existing graph; vertex and half-edge ids are preserved.
    pub fn from_graph(dg: &DecoratedGraph) -> Self {
        let g = &dg.graph;
        GraphBuilder {
            vertices: g.vertices.clone(),
            attachment: g.attachment.clone(),
            involution: g.involution.clone(),
            labels: g.labels.clone(),
            exponents: dg.exponents.clone(),
        }
    }

    pub fn add_vertex(&mut self, genus: u32) -> usize {
        self.vertices.push(Vertex::new(genus));
        self.vertices.len() - 1
    }

    pub fn add_vertex_with_extras(&mut self, genus: u32, extra_legs: u32) -> usize {
        self.vertices.push(Vertex { genus, extra_legs });
        self.vertices.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.attachment.len()
    }

    pub fn vertex_mut(&mut self, v: usize) -> &mut Vertex {
        &mut self.vertices[v]
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn add_leg(&mut self, v: usize, label: LegLabel, exponent: i32) -> usize {
        let h = self.attachment.len();
        self.attachment.push(v);
        self.involution.push(h);
        self.labels.push(Some(label));
        self.exponents.push(exponent);
        h
    }

    /// Adds an edge between `v` and `w` (a self-edge when equal); returns its
    /// two half-edges.
    pub fn add_edge(&mut self, v: usize, exp_v: i32, w: usize, exp_w: i32) -> (usize, usize) {
        let a = self.attachment.len();
        let b = a + 1;
        self.attachment.extend([v, w]);
        self.involution.extend([b, a]);
        self.labels.extend([None, None]);
        self.exponents.extend([exp_v, exp_w]);
        (a, b)
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.attachment[h]
    }

    pub fn partner(&self, h: usize) -> usize {
        self.involution[h]
    }

    pub fn exponent(&self, h: usize) -> i32 {
        self.exponents[h]
    }

    pub fn set_exponent(&mut self, h: usize, e: i32) {
        self.exponents[h] = e;
    }

    pub fn label(&self, h: usize) -> Option<LegLabel> {
        self.labels[h]
    }

    pub fn set_label(&mut self, h: usize, label: LegLabel) {
        self.labels[h] = Some(label);
    }

    /// Reattach half-edge `h` to vertex `v`.
    pub fn move_half_edge(&mut self, h: usize, v: usize) {
        self.attachment[h] = v;
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.attachment.len())
            .filter(|&h| self.attachment[h] == v)
            .collect()
    }

    /// Turns the leg `h` into half of an edge with leg `k`.
    pub fn join(&mut self, h: usize, k: usize) {
        self.involution[h] = k;
        self.involution[k] = h;
        self.labels[h] = None;
        self.labels[k] = None;
    }

    /// Deletes the given half-edges and vertices, renumbering what remains in
    /// order. Partners of deleted half-edges must be deleted too.
    pub fn remove(&mut self, half_edges: &[usize], vertices: &[usize]) {
        let keep_h: Vec<bool> = (0..self.attachment.len()).map(|h| !half_edges.contains(&h)).collect();
        let keep_v: Vec<bool> = (0..self.vertices.len()).map(|v| !vertices.contains(&v)).collect();
        let h_map = renumber(&keep_h);
        let v_map = renumber(&keep_v);
        let mut b = GraphBuilder::new();
        for (v, vert) in self.vertices.iter().enumerate() {
            if keep_v[v] {
                b.vertices.push(*vert);
            }
        }
        for h in 0..self.attachment.len() {
            if !keep_h[h] {
                continue;
            }
            b.attachment.push(v_map[self.attachment[h]]);
            b.involution.push(h_map[self.involution[h]]);
            b.labels.push(self.labels[h]);
            b.exponents.push(self.exponents[h]);
        }
        *self = b;
    }

    /// Contracts the edge containing `h`, which must join two distinct
    /// vertices; the merged vertex keeps the smaller id and the genus sum.
    pub fn contract_edge(&mut self, h: usize) {
        let k = self.involution[h];
        let (a, b) = (self.attachment[h], self.attachment[k]);
        assert_ne!(a, b, "contracting a self-edge");
        let (keep, drop) = (a.min(b), a.max(b));
        self.vertices[keep].genus += self.vertices[drop].genus;
        self.vertices[keep].extra_legs += self.vertices[drop].extra_legs;
        for x in self.attachment.iter_mut() {
            if *x == drop {
                *x = keep;
            }
        }
        self.remove(&[h, k], &[drop]);
    }

    pub fn build(self) -> Result<DecoratedGraph, GraphError> {
        let graph = DualGraph::new(self.vertices, self.attachment, self.involution, self.labels)?;
        DecoratedGraph::new(graph, self.exponents)
    }

    pub fn build_unchecked(self) -> DecoratedGraph {
        let graph = DualGraph::from_parts(self.vertices, self.attachment, self.involution, self.labels);
        DecoratedGraph::from_parts_unchecked(graph, self.exponents)
    }
}

fn renumber(keep: &[bool]) -> Vec<usize> {
    let mut next = 0;
    keep.iter()
        .map(|&k| {
            let id = next;
            if k {
                next += 1;
            }
            id
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contracting_an_edge_sums_genera() {
        let mut b = GraphBuilder::new();
        let r = b.add_vertex(0);
        let t = b.add_vertex(1);
        b.add_leg(r, LegLabel::Regular(1), 0);
        b.add_leg(r, LegLabel::Regular(2), 0);
        let (h, _) = b.add_edge(r, 0, t, 0);
        b.add_leg(t, LegLabel::Regular(3), 1);
        let before = b.clone().build().unwrap();
        b.contract_edge(h);
        let after = b.build().unwrap();
        assert_eq!(after.graph().num_vertices(), 1);
        assert_eq!(after.graph().genus(), before.graph().genus());
        assert_eq!(after.leg_exponent(LegLabel::Regular(3)), Some(1));
    }

    #[test]
    fn degree_counts_edges_and_psi() {
        let mut b = GraphBuilder::new();
        let r = b.add_vertex(0);
        b.add_leg(r, LegLabel::Regular(1), 2);
        b.add_edge(r, 1, r, 0);
        let g = b.build().unwrap();
        assert_eq!(g.degree(), 4);
        assert_eq!(g.vertex_psi_degree(0), 3);
    }
}
