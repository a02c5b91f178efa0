#![allow(dead_code)]

use proptest::prelude::*;
use std::collections::BTreeSet;
use std::path::PathBuf;
use tautrel::bclass::TreeShape;
use tautrel::expr::{int, parse_bracket, Expression, Rational};
use tautrel::graph::{DecoratedGraph, DualGraph, GraphBuilder, LegLabel, RootedTreeView, Vertex};

pub fn fixture(name: &str) -> Expression {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(format!("{name}.br"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_bracket(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Raw ingredients of a random connected stable decorated graph.
#[derive(Clone, Debug)]
pub struct GraphRecipe {
    pub genera: Vec<u32>,
    pub extras: Vec<u32>,
    pub parents: Vec<usize>,
    pub extra_edges: Vec<(usize, usize)>,
    pub legs: Vec<(usize, bool)>,
    pub exponents: Vec<i32>,
}

pub fn graph_recipe(max_vertices: usize) -> impl Strategy<Value = GraphRecipe> {
    (1..=max_vertices).prop_flat_map(|n| {
        (
            prop::collection::vec(0u32..=1, n),
            prop::collection::vec(prop_oneof![4 => Just(0u32), 1 => Just(1u32)], n),
            prop::collection::vec(any::<usize>(), n - 1),
            prop::collection::vec((0..n, 0..n), 0..=2),
            prop::collection::vec((0..n, any::<bool>()), 0..=4),
            prop::collection::vec(prop_oneof![3 => Just(0), 1 => Just(1), 1 => Just(2)], 16),
        )
            .prop_map(|(genera, extras, parents, extra_edges, legs, exponents)| GraphRecipe {
                parents: parents.iter().enumerate().map(|(i, &p)| p % (i + 1)).collect(),
                genera,
                extras,
                extra_edges,
                legs,
                exponents,
            })
    })
}

impl GraphRecipe {
    /// Builds the graph, adding regular legs where a vertex would be unstable.
    pub fn build(&self) -> DecoratedGraph {
        let mut b = GraphBuilder::new();
        for (&g, &x) in self.genera.iter().zip(&self.extras) {
            b.add_vertex_with_extras(g, x);
        }
        let mut exps = self.exponents.iter().cycle().copied();
        for (i, &p) in self.parents.iter().enumerate() {
            b.add_edge(p, exps.next().unwrap(), i + 1, exps.next().unwrap());
        }
        for &(v, w) in &self.extra_edges {
            b.add_edge(v, exps.next().unwrap(), w, exps.next().unwrap());
        }
        let (mut frozen, mut regular) = (0, 0);
        for &(v, is_frozen) in &self.legs {
            let label = if is_frozen {
                frozen += 1;
                LegLabel::Frozen(frozen)
            } else {
                regular += 1;
                LegLabel::Regular(regular)
            };
            b.add_leg(v, label, exps.next().unwrap());
        }
        for v in 0..b.num_vertices() {
            loop {
                let g = b.vertex(v).genus as i64;
                let val = (b.half_edges_at(v).len() + b.vertex(v).extra_legs as usize) as i64;
                if 2 * g - 2 + val > 0 {
                    break;
                }
                regular += 1;
                b.add_leg(v, LegLabel::Regular(regular), exps.next().unwrap());
            }
        }
        b.build().expect("recipe builds a valid graph")
    }
}

/// The same graph with vertices and half-edges renumbered by the orders
/// that sort `vkeys` and `hkeys`.
pub fn relabel(dg: &DecoratedGraph, vkeys: &[u32], hkeys: &[u32]) -> DecoratedGraph {
    let g = dg.graph();
    let order = |n: usize, keys: &[u32]| {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by_key(|&i| (keys.get(i).copied().unwrap_or(0), i));
        let mut new_of_old = vec![0; n];
        for (new, &old) in idx.iter().enumerate() {
            new_of_old[old] = new;
        }
        (idx, new_of_old)
    };
    let (vold, vnew) = order(g.num_vertices(), vkeys);
    let (hold, hnew) = order(g.num_half_edges(), hkeys);
    let vertices: Vec<Vertex> = vold.iter().map(|&v| *g.vertex(v)).collect();
    let attachment = hold.iter().map(|&h| vnew[g.vertex_of(h)]).collect();
    let involution = hold.iter().map(|&h| hnew[g.partner(h)]).collect();
    let labels = hold.iter().map(|&h| g.label(h)).collect();
    let exponents = hold.iter().map(|&h| dg.exponent(h)).collect();
    DecoratedGraph::new(
        DualGraph::new(vertices, attachment, involution, labels).unwrap(),
        exponents,
    )
    .unwrap()
}

/// Counts half-edge permutations preserving the involution, labels,
/// exponents and an induced genus/extra-preserving vertex bijection.
pub fn brute_force_automorphisms(dg: &DecoratedGraph) -> u64 {
    let g = dg.graph();
    let n = g.num_half_edges();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut count = 0;
    permutations(&mut perm, 0, &mut |sigma| {
        let mut phi = vec![None; g.num_vertices()];
        for h in 0..n {
            let (v, w) = (g.vertex_of(h), g.vertex_of(sigma[h]));
            if g.partner(sigma[h]) != sigma[g.partner(h)]
                || g.label(h) != g.label(sigma[h])
                || dg.exponent(h) != dg.exponent(sigma[h])
                || g.vertex(v) != g.vertex(w)
            {
                return;
            }
            match phi[v] {
                None => phi[v] = Some(w),
                Some(x) if x != w => return,
                _ => {}
            }
        }
        let mut image: Vec<usize> = phi.iter().flatten().copied().collect();
        image.sort_unstable();
        image.dedup();
        if image.len() == phi.iter().flatten().count() {
            count += 1;
        }
    });
    count
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// ∫ over Mbar_{0,n} of ∏ψ^a by the string equation alone.
pub fn genus0_by_string(a: &[u32]) -> Rational {
    let n = a.len();
    if a.iter().sum::<u32>() as usize + 3 != n {
        return int(0);
    }
    if n == 3 {
        return int(1);
    }
    let Some(z) = a.iter().position(|&x| x == 0) else {
        return int(0);
    };
    let rest: Vec<u32> = a.iter().enumerate().filter(|&(i, _)| i != z).map(|(_, &x)| x).collect();
    let mut sum = int(0);
    for j in 0..rest.len() {
        if rest[j] > 0 {
            let mut r = rest.clone();
            r[j] -= 1;
            sum += genus0_by_string(&r);
        }
    }
    sum
}

/// Every rooted tree on ≤ `max` vertices with the frozen legs on the root,
/// canonicalized and filtered through the shape conditions.
pub fn brute_force_shapes(g: u32, n: u32, m: u32, max: usize) -> BTreeSet<Vec<i64>> {
    let mut out = BTreeSet::new();
    for k in 1..=max {
        let parent_choices: Vec<Vec<usize>> = (1..k).map(|i| (0..i).collect()).collect();
        for parents in itertools_product(&parent_choices) {
            for genera in compositions(g, k) {
                for placement in itertools_product(&vec![(0..k).collect::<Vec<_>>(); n as usize]) {
                    let mut b = GraphBuilder::new();
                    for &gv in &genera {
                        b.add_vertex(gv);
                    }
                    for (i, &p) in parents.iter().enumerate() {
                        b.add_edge(p, 0, i + 1, 0);
                    }
                    for j in 1..=m {
                        b.add_leg(0, LegLabel::Frozen(j), 0);
                    }
                    for (j, &v) in placement.iter().enumerate() {
                        b.add_leg(v, LegLabel::Regular(j as u32 + 1), 0);
                    }
                    let Ok(dg) = b.build() else { continue };
                    let stable = (0..k).all(|v| dg.graph().vertex_is_stable(v));
                    let tree = RootedTreeView::new(dg, 0).unwrap();
                    let tops_ok = tree.top_vertices().into_iter().all(|v| {
                        let dg = tree.graph().graph();
                        dg.half_edges_at(v)
                            .iter()
                            .any(|&h| dg.label(h).is_some_and(|l| l.is_regular()))
                    });
                    if stable && tops_ok {
                        out.insert(TreeShape::new(tree).unwrap().key().as_slice().to_vec());
                    }
                }
            }
        }
    }
    out
}

pub fn itertools_product(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    choices.iter().fold(vec![vec![]], |acc, c| {
        acc.into_iter()
            .flat_map(|prefix| c.iter().map(move |&x| [prefix.clone(), vec![x]].concat()))
            .collect()
    })
}

pub fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=total)
        .flat_map(|x| {
            compositions(total - x, parts - 1)
                .into_iter()
                .map(move |r| [vec![x], r].concat())
        })
        .collect()
}
