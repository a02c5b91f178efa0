//! Pushforward along maps forgetting marked points, via the string equation
//!
//! ```text
//! π_* ∏ ψ_i^{q_i} = Σ_{p ∈ D_l(q)} l! / ∏ (q_i − p_i)! · ∏ ψ_i^{p_i}
//! ```
//!
//! applied one vertex at a time: forgetting points that sit on a vertex only
//! changes the ψ-monomial on that vertex.

use crate::expr::{AmbientSpace, ExprError, Expression, Rational};
use crate::graph::{DecoratedGraph, GraphBuilder, LegLabel};
use num_bigint::BigInt;
use num_traits::One;

#[derive(Debug, thiserror::Error)]
pub enum PushforwardError {
    #[error("vertex {vertex} of {graph} becomes unstable after forgetting its legs")]
    Unstable { vertex: usize, graph: String },
    #[error("forgotten leg {0} carries a ψ-class")]
    PsiOnForgottenLeg(LegLabel),
    #[error("cannot forget {wanted} frozen legs: only {available} present")]
    NotEnoughFrozen { wanted: u32, available: u32 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// All p with 0 ≤ p_i ≤ q_i and |p| = |q| − l, in lexicographic order.
pub fn d_set(q: &[u32], l: u32) -> Vec<Vec<u32>> {
    let total: u32 = q.iter().sum();
    if l > total {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut p = vec![0; q.len()];
    fill(q, total - l, 0, &mut p, &mut out);
    out
}

fn fill(q: &[u32], remaining: u32, i: usize, p: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i == q.len() {
        if remaining == 0 {
            out.push(p.clone());
        }
        return;
    }
    let rest: u32 = q[i + 1..].iter().sum();
    for x in 0..=q[i].min(remaining) {
        if remaining - x <= rest {
            p[i] = x;
            fill(q, remaining - x, i + 1, p, out);
        }
    }
}

/// The string-equation pushforward of one monomial forgetting `forgotten`
/// ψ-free points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialPushforwardTable {
    pub input: Vec<u32>,
    pub forgotten: u32,
    pub entries: Vec<(Vec<u32>, BigInt)>,
}

pub fn string_pushforward_vertex(q: &[u32], l: u32) -> MonomialPushforwardTable {
    let entries = d_set(q, l)
        .into_iter()
        .map(|p| {
            let denom: BigInt = q.iter().zip(&p).map(|(&a, &b)| factorial(a - b)).product();
            (p, factorial(l) / denom)
        })
        .collect();
    MonomialPushforwardTable {
        input: q.to_vec(),
        forgotten: l,
        entries,
    }
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product::<BigInt>().max(BigInt::one())
}

/// Applies the per-vertex tables; `forget[v]` is the number of ψ-free points
/// removed from vertex `v`. Returns coefficient and new exponents per output
/// monomial.
fn distribute(g: &DecoratedGraph, forget: &[u32]) -> Vec<(BigInt, Vec<i32>)> {
    let dg = g.graph();
    let mut partial: Vec<(BigInt, Vec<i32>)> = vec![(BigInt::one(), g.exponents().to_vec())];
    for (v, &l) in forget.iter().enumerate() {
        if l == 0 {
            continue;
        }
        let hs = dg.half_edges_at(v);
        let qv: Vec<u32> = hs.iter().map(|&h| g.exponent(h).max(0) as u32).collect();
        let table = string_pushforward_vertex(&qv, l);
        let mut next = Vec::new();
        for (c, exps) in &partial {
            for (p, k) in &table.entries {
                let mut e = exps.clone();
                for (&h, &x) in hs.iter().zip(p) {
                    e[h] = x as i32;
                }
                next.push((c * k, e));
            }
        }
        partial = next;
    }
    partial
}

/// e_*: forgets every extra leg, vertex by vertex.
pub fn forget_extra_legs(e: &Expression) -> Result<Expression, PushforwardError> {
    let a = e.ambient();
    let target = AmbientSpace::new(a.genus(), a.labels().to_vec())?;
    let mut out = Expression::zero(target);
    for t in e.terms() {
        let g = &t.graph;
        let dg = g.graph();
        let forget: Vec<u32> = dg.vertices().iter().map(|v| v.extra_legs).collect();
        if let Some(v) = (0..dg.num_vertices()).find(|&v| !dg.vertex_is_stable_without_extras(v)) {
            return Err(PushforwardError::Unstable {
                vertex: v,
                graph: g_render(g),
            });
        }
        let mut b = GraphBuilder::from_graph(g);
        for v in 0..dg.num_vertices() {
            b.vertex_mut(v).extra_legs = 0;
        }
        for (c, exps) in distribute(g, &forget) {
            let mut nb = b.clone();
            for (h, &x) in exps.iter().enumerate() {
                nb.set_exponent(h, x);
            }
            out.add_term(&t.coefficient * Rational::from_integer(c), &nb.build_unchecked())?;
        }
    }
    Ok(out)
}

/// π_*: forgets the `l` frozen legs with the largest indices.
pub fn forget_frozen_legs(e: &Expression, l: u32) -> Result<Expression, PushforwardError> {
    let a = e.ambient();
    let frozen: Vec<LegLabel> = a.labels().iter().copied().filter(|x| x.is_frozen()).collect();
    if (frozen.len() as u32) < l {
        return Err(PushforwardError::NotEnoughFrozen {
            wanted: l,
            available: frozen.len() as u32,
        });
    }
    let forgotten = &frozen[frozen.len() - l as usize..];
    let kept: Vec<LegLabel> = a.labels().iter().copied().filter(|x| !forgotten.contains(x)).collect();
    let target = AmbientSpace::with_extra(a.genus(), kept, a.extra())?;
    let mut out = Expression::zero(target);
    for t in e.terms() {
        let g = &t.graph;
        let dg = g.graph();
        let mut forget = vec![0u32; dg.num_vertices()];
        let mut legs = Vec::new();
        for &label in forgotten {
            let h = dg.leg_of(label).expect("legs match ambient");
            if g.exponent(h) != 0 {
                return Err(PushforwardError::PsiOnForgottenLeg(label));
            }
            forget[dg.vertex_of(h)] += 1;
            legs.push(h);
        }
        for (v, &k) in forget.iter().enumerate() {
            let g_v = dg.vertex(v).genus as i64;
            if k > 0 && 2 * g_v - 2 + dg.valence(v) as i64 - k as i64 <= 0 {
                return Err(PushforwardError::Unstable {
                    vertex: v,
                    graph: g_render(g),
                });
            }
        }
        for (c, exps) in distribute(g, &forget) {
            let mut b = GraphBuilder::from_graph(g);
            for (h, &x) in exps.iter().enumerate() {
                b.set_exponent(h, x);
            }
            b.remove(&legs, &[]);
            out.add_term(&t.coefficient * Rational::from_integer(c), &b.build_unchecked())?;
        }
    }
    Ok(out)
}

fn g_render(g: &DecoratedGraph) -> String {
    let dg = g.graph();
    let a = AmbientSpace::with_extra(
        dg.genus(),
        dg.legs().into_iter().map(|(_, l)| l).collect(),
        dg.total_extra_legs(),
    );
    match a.and_then(|a| Expression::from_graph(a, Rational::one(), g)) {
        Ok(e) if !e.is_zero() => e.render_bracket(),
        _ => format!("{g:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_bracket;

    #[test]
    fn d_sets() {
        assert_eq!(d_set(&[2, 1], 1), vec![vec![1, 1], vec![2, 0]]);
        assert_eq!(d_set(&[1, 1], 2), vec![vec![0, 0]]);
        assert!(d_set(&[1], 2).is_empty());
    }

    #[test]
    fn tables() {
        let t = string_pushforward_vertex(&[2], 1);
        assert_eq!(t.entries, vec![(vec![1], BigInt::from(1))]);
        let t = string_pushforward_vertex(&[1, 1], 1);
        assert_eq!(
            t.entries,
            vec![(vec![0, 1], BigInt::from(1)), (vec![1, 0], BigInt::from(1))]
        );
        assert!(string_pushforward_vertex(&[0], 1).entries.is_empty());
        let t = string_pushforward_vertex(&[2, 1], 3);
        assert_eq!(t.entries, vec![(vec![0, 0], BigInt::from(3))]);
    }

    #[test]
    fn extra_legs_on_a_genus_one_vertex() {
        let e = parse_bracket("<V1 V2 g>_0 <g* W1 P^2(U1) P(U2)>_1").unwrap();
        let f = forget_extra_legs(&e).unwrap();
        let expected = parse_bracket("<V1 V2 g>_0 <g* P^2(U1) U2>_1 + <V1 V2 g>_0 <g* P(U1) P(U2)>_1").unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn three_extra_legs_on_a_genus_zero_vertex() {
        let e = parse_bracket("<V1 V2 P^2(g)>_1 <g* W1 W2 W3 P^2(U1) P(U2)>_0").unwrap();
        let f = forget_extra_legs(&e).unwrap();
        assert_eq!(f, parse_bracket("3*<V1 V2 P^2(g)>_1 <g* U1 U2>_0").unwrap());
    }

    #[test]
    fn degenerate_vertex_is_an_error() {
        let e = parse_bracket("<V1 V2 g>_0 <g* W1 U1>_0").unwrap();
        assert!(matches!(forget_extra_legs(&e), Err(PushforwardError::Unstable { .. })));
    }

    #[test]
    fn forgetting_a_frozen_leg() {
        let e = parse_bracket("<V1 V2 V3 P(U1)>_0").unwrap();
        let f = forget_frozen_legs(&e, 1).unwrap();
        assert_eq!(f, parse_bracket("<V1 V2 U1>_0").unwrap());

        let e = parse_bracket("<V1 V2 V3 g>_0 <g* U1 U2 U3>_0").unwrap();
        assert!(forget_frozen_legs(&e, 1).unwrap().is_zero());

        let e = parse_bracket("<V1 V2 V3 V4 P^2(g)>_0 <g* P(U1) U2 U3 U4>_0").unwrap();
        let f = forget_frozen_legs(&e, 1).unwrap();
        assert_eq!(f, parse_bracket("<V1 V2 V3 P(g)>_0 <g* P(U1) U2 U3 U4>_0").unwrap());
    }
}
