use super::{DecoratedGraph, GraphError};
use std::collections::VecDeque;

/// A decorated graph certified to be a tree with a chosen root carrying all
/// frozen legs. Levels start at 1 on the root.
///
/// A half-edge is positively directed when it points away from the root,
/// i.e. it sits on the parent side of its edge.
#[derive(Clone, Debug)]
pub struct RootedTreeView {
    graph: DecoratedGraph,
    root: usize,
    level: Vec<u32>,
    parent: Vec<Option<usize>>,
    /// For a non-root vertex: its own half-edge on the edge to the parent.
    up: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl RootedTreeView {
    pub fn new(graph: DecoratedGraph, root: usize) -> Result<Self, GraphError> {
        let g = graph.graph();
        let n = g.num_vertices();
        if root >= n {
            return Err(GraphError::BadRoot(root));
        }
        if g.num_edges() + 1 != n {
            return Err(GraphError::NotATree);
        }
        for (h, label) in g.legs() {
            if label.is_frozen() && g.vertex_of(h) != root {
                return Err(GraphError::FrozenOffRoot(label));
            }
        }
        let mut level = vec![0u32; n];
        let mut parent = vec![None; n];
        let mut up = vec![None; n];
        let mut children = vec![Vec::new(); n];
        level[root] = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for h in g.half_edges_at(v) {
                let p = g.partner(h);
                if p == h {
                    continue;
                }
                let w = g.vertex_of(p);
                if w == v {
                    return Err(GraphError::NotATree);
                }
                if level[w] == 0 {
                    level[w] = level[v] + 1;
                    parent[w] = Some(v);
                    up[w] = Some(p);
                    children[v].push(w);
                    queue.push_back(w);
                }
            }
        }
        if level.contains(&0) {
            return Err(GraphError::NotATree);
        }
        Ok(RootedTreeView {
            graph,
            root,
            level,
            parent,
            up,
            children,
        })
    }

    pub fn graph(&self) -> &DecoratedGraph {
        &self.graph
    }

    pub fn into_graph(self) -> DecoratedGraph {
        self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn level(&self, v: usize) -> u32 {
        self.level[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Half-edge of `v` on the edge towards the root (negatively directed).
    pub fn up_half_edge(&self, v: usize) -> Option<usize> {
        self.up[v]
    }

    /// Half-edge of the parent of `v` on the edge to `v` (positively directed).
    pub fn down_half_edge(&self, v: usize) -> Option<usize> {
        self.up[v].map(|h| self.graph.graph().partner(h))
    }

    pub fn is_positively_directed(&self, h: usize) -> bool {
        let g = self.graph.graph();
        let p = g.partner(h);
        p != h && self.level[g.vertex_of(p)] > self.level[g.vertex_of(h)]
    }

    /// Vertices without children.
    pub fn top_vertices(&self) -> Vec<usize> {
        (0..self.level.len()).filter(|&v| self.children[v].is_empty()).collect()
    }

    /// Smallest level of a vertex with at least two children; `None` for a
    /// chain.
    pub fn branching_height(&self) -> Option<u32> {
        (0..self.level.len())
            .filter(|&v| self.children[v].len() >= 2)
            .map(|v| self.level[v])
            .min()
    }

    /// No extra legs on the root, at least one on every other vertex.
    pub fn is_balanced(&self) -> bool {
        let g = self.graph.graph();
        (0..g.num_vertices()).all(|v| {
            let k = g.vertex(v).extra_legs;
            if v == self.root {
                k == 0
            } else {
                k >= 1
            }
        })
    }

    /// Still stable after deleting every extra leg.
    pub fn is_nondegenerate(&self) -> bool {
        let g = self.graph.graph();
        (0..g.num_vertices()).all(|v| g.vertex_is_stable_without_extras(v))
    }
}
