//! Acceptable trees and the classes B^m_{g,d}.
//!
//! A shape is a stable rooted tree with the frozen legs V1..Vm on the root,
//! regular legs U1..Un anywhere, no extra legs, and a regular leg on every
//! top vertex. Decorating a shape with p(v) + 1 extra legs on each non-root
//! vertex v and with the ψ-decoration q_d gives the trees T_p, and
//!
//! ```text
//! B^m_{g,d} = Σ_shapes (−1)^{|E|} Σ_p e_*[T_p, q_d].
//! ```

use crate::expr::{AmbientSpace, ExprError, Expression, Rational};
use crate::graph::{canonical_form_marked, CanonicalKey, GraphBuilder, GraphError, LegLabel, RootedTreeView};
use crate::pushforward::{forget_extra_legs, forget_frozen_legs, string_pushforward_vertex, PushforwardError};
use num_traits::One;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum BClassError {
    #[error("unstable parameters: 2g - 2 + n + m = {0} is not positive")]
    UnstableTarget(i64),
    #[error("a weight vector needs at least one entry")]
    EmptyWeights,
    #[error("invalid weight vector {0:?}")]
    BadWeights(String),
    #[error("tree is not balanced")]
    Unbalanced,
    #[error("weight vector has {weights} entries but the tree has {legs} regular legs")]
    WeightMismatch { weights: usize, legs: usize },
    #[error("not an acceptable tree shape: {0}")]
    NotAShape(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Pushforward(#[from] PushforwardError),
}

/// Weights d = (d1..dn) on the regular legs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(Vec<u32>);

impl WeightVector {
    pub fn new(d: Vec<u32>) -> Result<Self, BClassError> {
        if d.is_empty() {
            return Err(BClassError::EmptyWeights);
        }
        Ok(WeightVector(d))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Weight of the regular leg U_i (1-based).
    pub fn weight(&self, i: u32) -> u32 {
        self.0[i as usize - 1]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }
}

impl FromStr for WeightVector {
    type Err = BClassError;

    fn from_str(s: &str) -> Result<Self, BClassError> {
        let parts: Result<Vec<u32>, _> = s
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|x| x.trim().parse::<u32>())
            .collect();
        WeightVector::new(parts.map_err(|_| BClassError::BadWeights(s.into()))?)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A member of 𝒜′_{g,n,m}, stored in canonical form.
#[derive(Clone, Debug)]
pub struct TreeShape {
    tree: RootedTreeView,
    key: CanonicalKey,
}

impl TreeShape {
    pub fn new(tree: RootedTreeView) -> Result<Self, BClassError> {
        let g = tree.graph().graph();
        if g.total_extra_legs() > 0 {
            return Err(BClassError::NotAShape("has extra legs".into()));
        }
        if !g.is_stable() {
            return Err(BClassError::NotAShape("unstable".into()));
        }
        if !tree.graph().is_psi_free() {
            return Err(BClassError::NotAShape("carries ψ-classes".into()));
        }
        for v in tree.top_vertices() {
            let has_regular = g
                .half_edges_at(v)
                .iter()
                .any(|&h| g.label(h).is_some_and(LegLabel::is_regular));
            if !has_regular {
                return Err(BClassError::NotAShape(format!("top vertex {v} has no regular leg")));
            }
        }
        let mut marks = vec![0; g.num_vertices()];
        marks[tree.root()] = 1;
        let cf = canonical_form_marked(tree.graph(), &marks);
        let root = cf.vertex_map[tree.root()];
        Ok(TreeShape {
            tree: RootedTreeView::new(cf.graph, root)?,
            key: cf.key,
        })
    }

    pub fn tree(&self) -> &RootedTreeView {
        &self.tree
    }

    pub fn key(&self) -> &CanonicalKey {
        &self.key
    }

    pub fn num_vertices(&self) -> usize {
        self.tree.graph().graph().num_vertices()
    }

    pub fn num_edges(&self) -> usize {
        self.tree.graph().graph().num_edges()
    }

    /// Bracket rendering of the undecorated shape.
    pub fn render(&self) -> String {
        let g = self.tree.graph().graph();
        let a = AmbientSpace::new(g.genus(), g.legs().into_iter().map(|(_, l)| l).collect());
        a.and_then(|a| Expression::from_graph(a, Rational::one(), self.tree.graph()))
            .map(|e| e.render_bracket())
            .unwrap_or_default()
    }

    /// The regular legs U_i sitting on vertex v.
    fn regular_at(&self, v: usize) -> Vec<u32> {
        let g = self.tree.graph().graph();
        g.half_edges_at(v)
            .into_iter()
            .filter_map(|h| match g.label(h) {
                Some(LegLabel::Regular(i)) => Some(i),
                _ => None,
            })
            .collect()
    }

    fn post_order(&self) -> Vec<usize> {
        fn visit(t: &RootedTreeView, v: usize, out: &mut Vec<usize>) {
            for &c in t.children(v) {
                visit(t, c, out);
            }
            out.push(v);
        }
        let mut out = Vec::new();
        visit(&self.tree, self.tree.root(), &mut out);
        out
    }
}

/// Extra legs per non-root vertex: vertex v receives p(v) + 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExtraLegAssignment {
    /// Indexed by vertex id; the root entry is unused and zero.
    p: Vec<u32>,
    root: usize,
}

impl ExtraLegAssignment {
    pub fn new(shape: &TreeShape, p: Vec<u32>) -> Self {
        ExtraLegAssignment {
            p,
            root: shape.tree.root(),
        }
    }

    pub fn p(&self, v: usize) -> u32 {
        self.p[v]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.p
    }

    /// Number of extra legs on v.
    pub fn extra_legs(&self, v: usize) -> u32 {
        if v == self.root {
            0
        } else {
            self.p[v] + 1
        }
    }

    /// (vertex, p(v)) for all non-root vertices.
    pub fn entries(&self) -> Vec<(usize, u32)> {
        (0..self.p.len())
            .filter(|&v| v != self.root)
            .map(|v| (v, self.p[v]))
            .collect()
    }
}

#[derive(Clone, Debug)]
struct Node {
    genus: u32,
    legs: Vec<u32>,
    children: Vec<Node>,
}

/// All of 𝒜′_{g,n,m}, sorted by vertex count and key.
pub fn enumerate_shapes(g: u32, n: u32, m: u32) -> Result<Vec<TreeShape>, BClassError> {
    let chi = 2 * g as i64 - 2 + n as i64 + m as i64;
    if chi <= 0 || n == 0 {
        return Err(BClassError::UnstableTarget(chi));
    }
    let legs: Vec<u32> = (1..=n).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for node in subtrees(g, &legs, m as usize) {
        let mut b = GraphBuilder::new();
        let root = b.add_vertex(node.genus);
        for i in 1..=m {
            b.add_leg(root, LegLabel::Frozen(i), 0);
        }
        attach(&mut b, root, &node);
        let tree = RootedTreeView::new(b.build()?, root)?;
        let shape = TreeShape::new(tree)?;
        if seen.insert(shape.key.clone()) {
            out.push(shape);
        }
    }
    out.sort_by(|a, b| (a.num_vertices(), &a.key).cmp(&(b.num_vertices(), &b.key)));
    Ok(out)
}

fn attach(b: &mut GraphBuilder, v: usize, node: &Node) {
    for &i in &node.legs {
        b.add_leg(v, LegLabel::Regular(i), 0);
    }
    for c in &node.children {
        let w = b.add_vertex(c.genus);
        b.add_edge(v, 0, w, 0);
        attach(b, w, c);
    }
}

/// Rooted subtrees of total genus `genus` carrying exactly the regular legs
/// `legs`, whose root has `fixed` further half-edges (frozen legs or the edge
/// to the parent).
fn subtrees(genus: u32, legs: &[u32], fixed: usize) -> Vec<Node> {
    let mut out = Vec::new();
    for g_v in 0..=genus {
        for mask in 0u32..(1 << legs.len()) {
            let here: Vec<u32> = (0..legs.len())
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| legs[i])
                .collect();
            let rest: Vec<u32> = (0..legs.len())
                .filter(|&i| mask & (1 << i) == 0)
                .map(|i| legs[i])
                .collect();
            for blocks in set_partitions(&rest) {
                let valence = fixed + here.len() + blocks.len();
                if 2 * g_v as i64 - 2 + valence as i64 <= 0 {
                    continue;
                }
                for genera in compositions(genus - g_v, blocks.len()) {
                    let options: Vec<Vec<Node>> = blocks
                        .iter()
                        .zip(&genera)
                        .map(|(blk, &gc)| subtrees(gc, blk, 1))
                        .collect();
                    for children in cartesian(&options) {
                        out.push(Node {
                            genus: g_v,
                            legs: here.clone(),
                            children,
                        });
                    }
                }
            }
        }
    }
    out
}

fn set_partitions(items: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in set_partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        let mut q = p;
        q.insert(0, vec![first]);
        out.push(q);
    }
    out
}

fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for x in 0..=total {
        for mut rest in compositions(total - x, parts - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn cartesian(options: &[Vec<Node>]) -> Vec<Vec<Node>> {
    let mut out = vec![Vec::new()];
    for opts in options {
        let mut next = Vec::new();
        for prefix in &out {
            for o in opts {
                let mut v = prefix.clone();
                v.push(o.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// The decoration q_d on a balanced tree: d_i on U_i, (extra legs on the
/// child) − 1 on each positively directed half-edge, 0 elsewhere.
pub fn q_d_decoration(t: &RootedTreeView, d: &WeightVector) -> Result<Vec<i32>, BClassError> {
    if !t.is_balanced() {
        return Err(BClassError::Unbalanced);
    }
    let g = t.graph().graph();
    let n_regular = g.legs().iter().filter(|(_, l)| l.is_regular()).count();
    if n_regular != d.n() {
        return Err(BClassError::WeightMismatch {
            weights: d.n(),
            legs: n_regular,
        });
    }
    let mut q = vec![0; g.num_half_edges()];
    for (h, l) in g.legs() {
        if let LegLabel::Regular(i) = l {
            q[h] = d.weight(i) as i32;
        }
    }
    for v in 0..g.num_vertices() {
        if let Some(h) = t.down_half_edge(v) {
            q[h] = g.vertex(v).extra_legs as i32 - 1;
        }
    }
    Ok(q)
}

/// The tree T_p with its decoration q_d.
pub fn decorated_tree(
    shape: &TreeShape,
    d: &WeightVector,
    p: &ExtraLegAssignment,
) -> Result<RootedTreeView, BClassError> {
    let mut b = GraphBuilder::from_graph(shape.tree.graph());
    for v in 0..shape.num_vertices() {
        b.vertex_mut(v).extra_legs = p.extra_legs(v);
    }
    let plain = RootedTreeView::new(b.build()?, shape.tree.root())?;
    let q = q_d_decoration(&plain, d)?;
    let mut b = GraphBuilder::from_graph(plain.graph());
    for (h, &e) in q.iter().enumerate() {
        b.set_exponent(h, e);
    }
    Ok(RootedTreeView::new(b.build()?, shape.tree.root())?)
}

/// Assignments satisfying, at every vertex v with k extra legs,
/// Σq(v) − (3g_v − 3 + |H_v \ L⁰|) ≤ k ≤ Σq(v); k = 0 on the root.
pub fn enumerate_acceptable(shape: &TreeShape, d: &WeightVector) -> Vec<ExtraLegAssignment> {
    let order = shape.post_order();
    let mut out = Vec::new();
    let mut k = vec![0i64; shape.num_vertices()];
    fn go(
        shape: &TreeShape,
        d: &WeightVector,
        order: &[usize],
        i: usize,
        k: &mut Vec<i64>,
        out: &mut Vec<ExtraLegAssignment>,
    ) {
        let t = &shape.tree;
        let g = t.graph().graph();
        if i == order.len() {
            let p = k.iter().map(|&x| (x - 1).max(0) as u32).collect();
            out.push(ExtraLegAssignment::new(shape, p));
            return;
        }
        let v = order[i];
        let sum_q: i64 = shape.regular_at(v).iter().map(|&j| d.weight(j) as i64).sum::<i64>()
            + t.children(v).iter().map(|&c| k[c] - 1).sum::<i64>();
        let dim = 3 * g.vertex(v).genus as i64 - 3 + g.valence(v) as i64;
        let (lo, hi) = if v == t.root() { (0, 0) } else { (1, sum_q) };
        for kv in lo.max(sum_q - dim)..=hi.min(sum_q) {
            k[v] = kv;
            go(shape, d, order, i + 1, k, out);
        }
        k[v] = 0;
    }
    go(shape, d, &order, 0, &mut k, &mut out);
    out
}

/// e_*[T_p, q_d] for one assignment.
pub fn contribution(shape: &TreeShape, d: &WeightVector, p: &ExtraLegAssignment) -> Result<Expression, BClassError> {
    let t = decorated_tree(shape, d, p)?;
    let dg = t.graph();
    let g = dg.graph();
    let ambient = AmbientSpace::with_extra(
        g.genus(),
        g.legs().into_iter().map(|(_, l)| l).collect(),
        g.total_extra_legs(),
    )?;
    let e = Expression::from_graph(ambient, Rational::one(), dg)?;
    Ok(forget_extra_legs(&e)?)
}

/// B(T′, d) = Σ_p e_*[T_p, q_d].
#[allow(non_snake_case)]
pub fn class_B_of_shape(shape: &TreeShape, d: &WeightVector) -> Result<Expression, BClassError> {
    let g = shape.tree.graph().graph();
    let ambient = AmbientSpace::new(g.genus(), g.legs().into_iter().map(|(_, l)| l).collect())?;
    let mut out = Expression::zero(ambient);
    for p in enumerate_acceptable(shape, d) {
        out.add_assign(&contribution(shape, d, &p)?)?;
    }
    Ok(out)
}

#[allow(non_snake_case)]
pub fn class_B(g: u32, m: u32, d: &WeightVector) -> Result<Expression, BClassError> {
    class_B_where(g, m, d, |_| true)
}

/// The sub-sum of `class_B` over the shapes accepted by `keep`.
#[allow(non_snake_case)]
pub fn class_B_where(
    g: u32,
    m: u32,
    d: &WeightVector,
    keep: impl Fn(&TreeShape) -> bool,
) -> Result<Expression, BClassError> {
    let ambient = AmbientSpace::standard(g, m, d.n() as u32)?;
    let mut out = Expression::zero(ambient);
    for shape in enumerate_shapes(g, d.n() as u32, m)? {
        if !keep(&shape) {
            continue;
        }
        let sign = if shape.num_edges() % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        };
        out.add_scaled(&class_B_of_shape(&shape, d)?, &sign)?;
    }
    Ok(out)
}

/// Both sides of the pushforward formula for B: π_* B^{m+l}_{g,d}, forgetting
/// the last l frozen legs, and Σ_{k ∈ D_l(d)} l!/∏(d_i − k_i)! · B^m_{g,k}.
pub fn pushforward_sides(g: u32, m: u32, l: u32, d: &WeightVector) -> Result<(Expression, Expression), BClassError> {
    let lhs = forget_frozen_legs(&class_B(g, m + l, d)?, l)?;
    let mut rhs = Expression::zero(AmbientSpace::standard(g, m, d.n() as u32)?);
    for (k, c) in string_pushforward_vertex(d.as_slice(), l).entries {
        rhs.add_scaled(&class_B(g, m, &WeightVector::new(k)?)?, &Rational::from_integer(c))?;
    }
    Ok((lhs, rhs))
}
