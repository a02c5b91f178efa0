//! WDVV relations pushed forward from genus-0 vertices.
//!
//! For a graph Γ, a ψ-free genus-0 vertex w and four of its half-edges
//! h1..h4, write R(12|34) for the sum over all ways of splitting w into two
//! genus-0 vertices joined by a new edge, with h1, h2 on one side and h3, h4
//! on the other (the remaining half-edges distributed in all ways). Then
//! R(12|34) − R(13|24) and R(12|34) − R(14|23) vanish.
//!
//! Relations are generated from the support of an expression: every edge of
//! a support graph joining two distinct ψ-free genus-0 vertices is contracted,
//! and the relations at the merged vertex are added. Graphs appearing in new
//! relations join the support for the next round.

use super::psi::{split_vertex, subsets};
use super::ReduceError;
use crate::expr::{AmbientSpace, Expression, Rational};
use crate::graph::{canonical_form, canonical_form_marked, CanonicalKey, DecoratedGraph, GraphBuilder};
use num_traits::One;
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpanBudget {
    /// Support closure rounds.
    pub rounds: u32,
    /// Hard cap on the number of generated relations.
    pub max_relations: usize,
}

impl Default for SpanBudget {
    fn default() -> Self {
        SpanBudget {
            rounds: 3,
            max_relations: 200_000,
        }
    }
}

/// A list of expressions, each a WDVV relation, together with the keys of
/// all graphs they involve.
#[derive(Clone, Debug)]
pub struct RelationBasis {
    pub ambient: AmbientSpace,
    pub relations: Vec<Expression>,
    pub support: BTreeSet<CanonicalKey>,
}

impl RelationBasis {
    pub fn empty(ambient: AmbientSpace) -> Self {
        RelationBasis {
            ambient,
            relations: Vec::new(),
            support: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }
}

fn vertex_is_splittable(g: &DecoratedGraph, v: usize) -> bool {
    let dg = g.graph();
    dg.vertex(v).genus == 0 && dg.vertex(v).extra_legs == 0 && dg.half_edges_at(v).iter().all(|&h| g.exponent(h) == 0)
}

/// Edges (by one half-edge) joining two distinct ψ-free genus-0 vertices.
pub(crate) fn contractible_edges(g: &DecoratedGraph) -> Vec<usize> {
    let dg = g.graph();
    dg.edges()
        .into_iter()
        .filter(|&(a, b)| {
            let (v, w) = (dg.vertex_of(a), dg.vertex_of(b));
            v != w && vertex_is_splittable(g, v) && vertex_is_splittable(g, w)
        })
        .map(|(a, _)| a)
        .collect()
}

/// Contracts every contractible edge. All graphs connected by WDVV relations
/// share this core.
pub(crate) fn core_key(g: &DecoratedGraph) -> CanonicalKey {
    let mut g = g.clone();
    while let Some(&h) = contractible_edges(&g).first() {
        let mut b = GraphBuilder::from_graph(&g);
        b.contract_edge(h);
        g = b.build_unchecked();
    }
    canonical_form(&g).key
}

fn split_sum(
    ambient: &AmbientSpace,
    g: &DecoratedGraph,
    w: usize,
    left: [usize; 2],
    right: [usize; 2],
) -> Result<Expression, ReduceError> {
    let rest: Vec<usize> = g
        .graph()
        .half_edges_at(w)
        .into_iter()
        .filter(|h| !left.contains(h) && !right.contains(h))
        .collect();
    let mut out = Expression::zero(ambient.clone());
    for (_, moved) in subsets(&rest) {
        let mut moved = moved;
        moved.extend(right);
        out.add_term(Rational::one(), &split_vertex(g, w, 0, &moved, 0))?;
    }
    Ok(out)
}

/// The two independent WDVV relations for each 4-subset of half-edges at
/// vertex `w` of `g`.
pub fn wdvv_relations_at(ambient: &AmbientSpace, g: &DecoratedGraph, w: usize) -> Result<Vec<Expression>, ReduceError> {
    let hs = g.graph().half_edges_at(w);
    let mut out = Vec::new();
    if hs.len() < 4 || !vertex_is_splittable(g, w) {
        return Ok(out);
    }
    let n = hs.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let [h1, h2, h3, h4] = [hs[a], hs[b], hs[c], hs[d]];
                    let p12 = split_sum(ambient, g, w, [h1, h2], [h3, h4])?;
                    let p13 = split_sum(ambient, g, w, [h1, h3], [h2, h4])?;
                    let p14 = split_sum(ambient, g, w, [h1, h4], [h2, h3])?;
                    out.push(p12.sub(&p13)?);
                    out.push(p12.sub(&p14)?);
                }
            }
        }
    }
    Ok(out)
}

/// Closes `support` under relation participation for `budget.rounds` rounds.
pub fn generate_wdvv_relations(
    ambient: &AmbientSpace,
    support: &BTreeSet<CanonicalKey>,
    budget: &SpanBudget,
) -> Result<RelationBasis, ReduceError> {
    let mut basis = RelationBasis::empty(ambient.clone());
    basis.support = support.clone();
    let mut frontier: Vec<CanonicalKey> = support.iter().cloned().collect();
    let mut seen_contractions = BTreeSet::new();
    for _ in 0..budget.rounds {
        let mut discovered = BTreeSet::new();
        for key in &frontier {
            let g = key.to_graph();
            for h in contractible_edges(&g) {
                let dg = g.graph();
                let merged = dg.vertex_of(h).min(dg.vertex_of(dg.partner(h)));
                let mut b = GraphBuilder::from_graph(&g);
                b.contract_edge(h);
                let gamma = b.build_unchecked();
                let mut marks = vec![0; gamma.graph().num_vertices()];
                marks[merged] = 1;
                let cf = canonical_form_marked(&gamma, &marks);
                if !seen_contractions.insert(cf.key) {
                    continue;
                }
                let w = cf.vertex_map[merged];
                for r in wdvv_relations_at(ambient, &cf.graph, w)? {
                    if r.is_zero() {
                        continue;
                    }
                    for k in r.keys() {
                        if !basis.support.contains(k) {
                            discovered.insert(k.clone());
                        }
                    }
                    basis.relations.push(r);
                    if basis.relations.len() > budget.max_relations {
                        return Err(ReduceError::RelationOverflow(budget.max_relations));
                    }
                }
            }
        }
        if discovered.is_empty() {
            break;
        }
        basis.support.extend(discovered.iter().cloned());
        frontier = discovered.into_iter().collect();
    }
    Ok(basis)
}
