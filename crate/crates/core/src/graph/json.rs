use super::{DecoratedGraph, DualGraph, GraphError, LegLabel, Vertex};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: usize,
    pub genus: u32,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub extra_legs: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HalfEdgeJson {
    pub id: usize,
    pub vertex: usize,
    pub exponent: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegJson {
    pub id: usize,
    pub kind: String,
    pub index: u32,
}

/// Wire form of a [`DecoratedGraph`]. Edges appear in `involution` as sorted
/// pairs; legs are the fixed points and are listed in `legs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoratedGraphJson {
    pub vertices: Vec<VertexJson>,
    pub half_edges: Vec<HalfEdgeJson>,
    pub involution: Vec<[usize; 2]>,
    pub legs: Vec<LegJson>,
}

fn is_zero(x: &u32) -> bool {
    *x == 0
}

impl From<&DecoratedGraph> for DecoratedGraphJson {
    fn from(dg: &DecoratedGraph) -> Self {
        let g = dg.graph();
        DecoratedGraphJson {
            vertices: g
                .vertices()
                .iter()
                .enumerate()
                .map(|(id, v)| VertexJson {
                    id,
                    genus: v.genus,
                    extra_legs: v.extra_legs,
                })
                .collect(),
            half_edges: (0..g.num_half_edges())
                .map(|h| HalfEdgeJson {
                    id: h,
                    vertex: g.vertex_of(h),
                    exponent: dg.exponent(h),
                })
                .collect(),
            involution: g.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            legs: (0..g.num_half_edges())
                .filter_map(|h| {
                    g.label(h).map(|l| LegJson {
                        id: h,
                        kind: if l.is_frozen() { "frozen" } else { "regular" }.into(),
                        index: l.index(),
                    })
                })
                .collect(),
        }
    }
}

impl TryFrom<&DecoratedGraphJson> for DecoratedGraph {
    type Error = GraphError;

    fn try_from(j: &DecoratedGraphJson) -> Result<Self, GraphError> {
        use super::Violation;
        let bad = |v| GraphError::Invalid(vec![v]);
        let n_h = j.half_edges.len();
        let mut vertices = vec![Vertex::new(0); j.vertices.len()];
        for v in &j.vertices {
            if v.id >= vertices.len() {
                return Err(bad(Violation::LengthMismatch));
            }
            vertices[v.id] = Vertex {
                genus: v.genus,
                extra_legs: v.extra_legs,
            };
        }
        let mut attachment = vec![0; n_h];
        let mut exponents = vec![0; n_h];
        for h in &j.half_edges {
            if h.id >= n_h {
                return Err(bad(Violation::LengthMismatch));
            }
            attachment[h.id] = h.vertex;
            exponents[h.id] = h.exponent;
        }
        let mut involution: Vec<usize> = (0..n_h).collect();
        for &[a, b] in &j.involution {
            if a >= n_h || b >= n_h {
                return Err(bad(Violation::InvolutionOutOfRange { half_edge: a.max(b) }));
            }
            involution[a] = b;
            involution[b] = a;
        }
        let mut labels = vec![None; n_h];
        for l in &j.legs {
            if l.id >= n_h {
                return Err(bad(Violation::LengthMismatch));
            }
            labels[l.id] = Some(match l.kind.as_str() {
                "frozen" => LegLabel::Frozen(l.index),
                _ => LegLabel::Regular(l.index),
            });
        }
        let graph = DualGraph::new(vertices, attachment, involution, labels)?;
        DecoratedGraph::new(graph, exponents)
    }
}

#[cfg(test)]
mod tests {
    use super::super::GraphBuilder;
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut b = GraphBuilder::new();
        let r = b.add_vertex(0);
        let c = b.add_vertex_with_extras(1, 2);
        b.add_leg(r, LegLabel::Frozen(1), 0);
        b.add_leg(r, LegLabel::Frozen(2), 0);
        b.add_edge(r, 1, c, 0);
        b.add_leg(c, LegLabel::Regular(1), 2);
        let g = b.build().unwrap();
        let text = serde_json::to_string(&DecoratedGraphJson::from(&g)).unwrap();
        let back: DecoratedGraphJson = serde_json::from_str(&text).unwrap();
        let g2 = DecoratedGraph::try_from(&back).unwrap();
        assert_eq!(g, g2);
        assert_eq!(serde_json::to_string(&DecoratedGraphJson::from(&g2)).unwrap(), text);
    }
}
