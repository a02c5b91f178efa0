mod common;

use common::{compositions, genus0_by_string};
use num_traits::Zero;
use tautrel::bclass::{class_B, class_B_where, pushforward_sides, WeightVector};
use tautrel::expr::{int, parse_bracket, q, AmbientSpace};
use tautrel::graph::LegLabel;
use tautrel::pushforward::forget_frozen_legs;
use tautrel::reduce::{integrate, pair_with_psi_monomials, prove_zero, Integrator, SpanBudget};

#[test]
fn genus_zero_integrals_agree_with_the_string_equation() {
    let mut integrator = Integrator::new();
    for n in 3..=7usize {
        for a in compositions(n as u32 - 3, n) {
            let closed = integrator.vertex_integral(0, &a).unwrap();
            assert_eq!(closed, genus0_by_string(&a), "{a:?}");
        }
    }
}

#[test]
fn psi_on_m11() {
    assert_eq!(integrate(&parse_bracket("<P(x1)>_1").unwrap()).unwrap(), q(1, 24));
}

#[test]
fn genus_zero_b_classes_vanish() {
    for m in [2u32, 3] {
        for n in 1..=3usize {
            for total in [m - 1, m] {
                for d in compositions(total, n) {
                    let d = WeightVector::new(d).unwrap();
                    let b = class_B(0, m, &d).unwrap();
                    let v = prove_zero(&b, &SpanBudget::default()).unwrap();
                    assert!(v.is_zero(), "B^{m}_{{0,{d}}}: {}", v.label());
                }
            }
        }
    }
}

#[test]
fn top_degree_b3_integrates_to_zero() {
    let b = class_B(1, 2, &"3".parse().unwrap()).unwrap();
    assert_eq!(b.degree(), Some(b.ambient().dimension()));
    assert!(integrate(&b).unwrap().is_zero());
}

#[test]
fn pairings_of_genus_one_b_classes_vanish() {
    for d in ["2,1", "1,1,1"] {
        let b = class_B(1, 2, &d.parse().unwrap()).unwrap();
        let pairs = pair_with_psi_monomials(&b).unwrap();
        assert!(!pairs.is_empty());
        assert!(pairs.iter().all(|(_, v)| v.is_zero()), "{d}");
    }
}

#[test]
fn pushforward_formula() {
    for (g, m, l, d) in [(0, 2, 1, "1,1"), (1, 2, 1, "2,1"), (0, 2, 2, "2,1")] {
        let (lhs, rhs) = pushforward_sides(g, m, l, &d.parse().unwrap()).unwrap();
        assert_eq!(lhs, rhs, "(g,m,l,d) = ({g},{m},{l},{d})");
    }
}

#[test]
fn forgetting_one_leg_at_a_time() {
    for (g, m, l, d) in [(0, 2, 2, "2,1"), (1, 2, 1, "2,1"), (0, 2, 2, "1,1,1")] {
        let big = class_B(g, m + l, &d.parse().unwrap()).unwrap();
        let mut stepwise = big.clone();
        for _ in 0..l {
            stepwise = forget_frozen_legs(&stepwise, 1).unwrap();
        }
        assert_eq!(stepwise, forget_frozen_legs(&big, l).unwrap());
    }
}

#[test]
fn pushforward_of_a_class_below_the_bound_is_not_trivially_zero() {
    let b = class_B(1, 2, &"1,1".parse().unwrap()).unwrap();
    assert!(!b.is_zero());
    assert!(pair_with_psi_monomials(&b).unwrap().iter().any(|(_, v)| *v != int(0)));
}

#[test]
fn zero_weight_leg_on_the_root_acts_as_a_frozen_leg() {
    // Trees with U_{n+1} on the root, weight 0, give B^{m+1}_{g,d} once U_{n+1} is renamed V_{m+1}.
    for (g, m, d) in [
        (0, 2, vec![1]),
        (0, 2, vec![1, 1]),
        (0, 3, vec![1, 1]),
        (1, 1, vec![2, 1]),
        (1, 1, vec![1, 1, 1]),
    ] {
        let n = d.len() as u32;
        let mut padded = d.clone();
        padded.push(0);
        let last = LegLabel::Regular(n + 1);
        let s0 = class_B_where(g, m, &WeightVector::new(padded).unwrap(), |shape| {
            let t = shape.tree();
            let dg = t.graph().graph();
            dg.leg_of(last).is_some_and(|h| dg.vertex_of(h) == t.root())
        })
        .unwrap();
        let ambient = AmbientSpace::standard(g, m + 1, n).unwrap();
        let renamed = s0
            .relabel(ambient, |l| if l == last { LegLabel::Frozen(m + 1) } else { l })
            .unwrap();
        let expected = class_B(g, m + 1, &WeightVector::new(d.clone()).unwrap()).unwrap();
        assert!(!expected.is_zero(), "g={g} m={m} d={d:?} is empty");
        assert_eq!(renamed, expected, "g={g} m={m} d={d:?}");
    }
}
