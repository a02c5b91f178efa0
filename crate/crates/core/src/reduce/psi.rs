//! Elimination of ψ-classes on genus-0 and genus-1 vertices.
//!
//! On a genus-0 vertex with half-edges x1..xa (a ≥ 4) and chosen partners
//! x_{a−1}, x_a:
//!
//! ```text
//! ψ(x1) = Σ_{∅≠S⊆{x2..x_{a−2}}} ⟨x1 x_S γ⟩₀ ⟨γ* x_{S^c} x_{a−1} x_a⟩₀
//! ```
//!
//! On a genus-1 vertex with half-edges x1..xa (a ≥ 1):
//!
//! ```text
//! ψ(x1) = Σ_{∅≠S⊆{x2..xa}} ⟨x1 x_S γ⟩₀ ⟨γ* x_{S^c}⟩₁ + 1/12 ⟨x1..xa γ γ*⟩₀
//! ```
//!
//! The last bracket has an automorphism of order 2, so its stored
//! coefficient is 1/24. ψ-classes on the other half-edges stay on whichever
//! side their half-edge lands.

use super::ReduceError;
use crate::expr::{q, AmbientSpace, Expression, Term};
use crate::graph::{DecoratedGraph, GraphBuilder, LegLabel};

/// Splits vertex `v`: `moved` half-edges go to a new vertex of genus
/// `new_genus`, `v` gets genus `stay_genus`, and a ψ-free edge joins them.
pub(crate) fn split_vertex(
    g: &DecoratedGraph,
    v: usize,
    stay_genus: u32,
    moved: &[usize],
    new_genus: u32,
) -> DecoratedGraph {
    let mut b = GraphBuilder::from_graph(g);
    b.vertex_mut(v).genus = stay_genus;
    let w = b.add_vertex(new_genus);
    for &h in moved {
        b.move_half_edge(h, w);
    }
    b.add_edge(v, 0, w, 0);
    b.build_unchecked()
}

/// All subsets of `items` as (chosen, rest) pairs, in a fixed order.
pub(crate) fn subsets(items: &[usize]) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> + '_ {
    (0u64..(1 << items.len())).map(move |mask| {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, &h) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                a.push(h);
            } else {
                b.push(h);
            }
        }
        (a, b)
    })
}

fn lowered(g: &DecoratedGraph, target: usize) -> DecoratedGraph {
    let mut b = GraphBuilder::from_graph(g);
    b.set_exponent(target, g.exponent(target) - 1);
    b.build_unchecked()
}

fn check_target(g: &DecoratedGraph, vertex: usize, target: usize, genus: u32) -> Result<Vec<usize>, ReduceError> {
    let dg = g.graph();
    if dg.vertex(vertex).genus != genus {
        return Err(ReduceError::WrongGenus {
            vertex,
            expected: genus,
            found: dg.vertex(vertex).genus,
        });
    }
    if dg.vertex(vertex).extra_legs > 0 {
        return Err(ReduceError::ExtraLegs);
    }
    let hs = dg.half_edges_at(vertex);
    if !hs.contains(&target) {
        return Err(ReduceError::NotAtVertex {
            half_edge: target,
            vertex,
        });
    }
    if g.exponent(target) < 1 {
        return Err(ReduceError::NoPsi(target));
    }
    Ok(hs)
}

pub fn psi_reduce_genus0(
    ambient: &AmbientSpace,
    term: &Term,
    vertex: usize,
    target: usize,
    partners: (usize, usize),
) -> Result<Expression, ReduceError> {
    let g = &term.graph;
    let hs = check_target(g, vertex, target, 0)?;
    if hs.len() < 4 {
        return Err(ReduceError::TrivalentGenus0 { vertex });
    }
    let (pa, pb) = partners;
    if pa == pb || pa == target || pb == target || !hs.contains(&pa) || !hs.contains(&pb) {
        return Err(ReduceError::BadPartners);
    }
    let base = lowered(g, target);
    let others: Vec<usize> = hs
        .iter()
        .copied()
        .filter(|&h| h != target && h != pa && h != pb)
        .collect();
    let mut out = Expression::zero(ambient.clone());
    for (s, mut rest) in subsets(&others) {
        if s.is_empty() {
            continue;
        }
        rest.extend([pa, pb]);
        out.add_term(term.coefficient.clone(), &split_vertex(&base, vertex, 0, &rest, 0))?;
    }
    Ok(out)
}

pub fn psi_reduce_genus1(
    ambient: &AmbientSpace,
    term: &Term,
    vertex: usize,
    target: usize,
) -> Result<Expression, ReduceError> {
    let g = &term.graph;
    let hs = check_target(g, vertex, target, 1)?;
    let base = lowered(g, target);
    let others: Vec<usize> = hs.iter().copied().filter(|&h| h != target).collect();
    let mut out = Expression::zero(ambient.clone());
    for (s, rest) in subsets(&others) {
        if s.is_empty() {
            continue;
        }
        out.add_term(term.coefficient.clone(), &split_vertex(&base, vertex, 0, &rest, 1))?;
    }
    let mut b = GraphBuilder::from_graph(&base);
    b.vertex_mut(vertex).genus = 0;
    b.add_edge(vertex, 0, vertex, 0);
    out.add_term(&term.coefficient * q(1, 24), &b.build_unchecked())?;
    Ok(out)
}

/// Partner choice: legs first (frozen before regular, by index), then
/// half-edges of ordinary edges, then halves of self-edges, never both
/// halves of one self-edge when avoidable.
pub fn default_partners(g: &DecoratedGraph, vertex: usize, target: usize) -> Option<(usize, usize)> {
    let dg = g.graph();
    let rank = |h: usize| -> (u8, Option<LegLabel>, usize) {
        let p = dg.partner(h);
        if p == h {
            (0, dg.label(h), h)
        } else if dg.vertex_of(p) != vertex {
            (1, None, h)
        } else {
            (2, None, h)
        }
    };
    let mut hs: Vec<usize> = dg.half_edges_at(vertex).into_iter().filter(|&h| h != target).collect();
    hs.sort_by_key(|&h| rank(h));
    let first = *hs.first()?;
    let second = hs[1..]
        .iter()
        .copied()
        .find(|&h| h != dg.partner(first))
        .or_else(|| hs.get(1).copied())?;
    Some((first, second))
}

/// One reduction step on the ψ chosen by the elimination order: genus-1
/// vertices before genus-0, largest exponent first.
fn reduce_step(ambient: &AmbientSpace, term: &Term, genus1_only: bool) -> Result<Option<Expression>, ReduceError> {
    let g = &term.graph;
    let dg = g.graph();
    let mut best: Option<(u32, i32, usize)> = None;
    for h in 0..dg.num_half_edges() {
        let e = g.exponent(h);
        if e <= 0 {
            continue;
        }
        let genus = dg.vertex(dg.vertex_of(h)).genus;
        if genus >= 2 {
            return Err(ReduceError::HigherGenus(genus));
        }
        if genus1_only && genus == 0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((bg, be, _)) => (genus, e) > (bg, be),
        };
        if better {
            best = Some((genus, e, h));
        }
    }
    let Some((genus, _, h)) = best else {
        return Ok(None);
    };
    let v = dg.vertex_of(h);
    Ok(Some(if genus == 1 {
        psi_reduce_genus1(ambient, term, v, h)?
    } else {
        let partners = default_partners(g, v, h).ok_or(ReduceError::TrivalentGenus0 { vertex: v })?;
        psi_reduce_genus0(ambient, term, v, h, partners)?
    }))
}

fn eliminate(e: &Expression, genus1_only: bool) -> Result<Expression, ReduceError> {
    let ambient = e.ambient().clone();
    let mut current = e.clone();
    loop {
        let mut next = Expression::zero(ambient.clone());
        let mut changed = false;
        for t in current.terms() {
            match reduce_step(&ambient, t, genus1_only)? {
                Some(r) => {
                    next.add_assign(&r)?;
                    changed = true;
                }
                None => next.add_term(t.coefficient.clone(), &t.graph)?,
            }
        }
        if !changed {
            return Ok(next);
        }
        current = next;
    }
}

/// Rewrites every term as a ψ-free combination of boundary strata.
pub fn eliminate_all_psi(e: &Expression) -> Result<Expression, ReduceError> {
    eliminate(e, false)
}

/// Removes ψ-classes from genus-1 vertices only.
pub fn eliminate_genus1_psi(e: &Expression) -> Result<Expression, ReduceError> {
    eliminate(e, true)
}

/// ∂_x: the sum over vertices of the term with a new ψ-free leg `label`
/// attached to that vertex.
pub fn distribute(e: &Expression, label: LegLabel) -> Result<Expression, ReduceError> {
    let a = e.ambient();
    if a.contains(label) {
        return Err(ReduceError::NameCollision(label));
    }
    let mut labels = a.labels().to_vec();
    labels.push(label);
    let target = AmbientSpace::with_extra(a.genus(), labels, a.extra())?;
    let mut out = Expression::zero(target);
    for t in e.terms() {
        for v in 0..t.graph.graph().num_vertices() {
            let mut b = GraphBuilder::from_graph(&t.graph);
            b.add_leg(v, label, 0);
            out.add_term(t.coefficient.clone(), &b.build_unchecked())?;
        }
    }
    Ok(out)
}
