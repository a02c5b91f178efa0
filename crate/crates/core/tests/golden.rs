mod common;

use common::fixture;
use num_traits::Zero;
use tautrel::bclass::class_B;
use tautrel::expr::{int, q, Expression};
use tautrel::graph::LegLabel;
use tautrel::reduce::{
    certify_equal, eliminate_all_psi, eliminate_genus1_psi, pair_with_psi_monomials, prove_zero, psi_reduce_genus0,
    replay, SpanBudget, Verdict,
};

fn b(d: &str) -> Expression {
    class_B(1, 2, &d.parse().unwrap()).unwrap()
}

fn assert_zero(v: Verdict, what: &str) {
    assert!(v.is_zero(), "{what}: {}", v.label());
    if let Verdict::Certified {
        psi_free,
        certificate,
        basis,
    } = &v
    {
        assert!(
            replay(psi_free, certificate, basis),
            "{what}: certificate does not replay"
        );
    }
}

#[test]
fn raw_b21_matches_term_for_term() {
    let raw = b("2,1");
    assert_eq!(raw, fixture("b2_1_21_raw"));
    let mut coefficients: Vec<_> = raw.bracket_coefficients().into_iter().map(|(c, _)| c).collect();
    coefficients.sort();
    let mut expected = vec![int(1), int(-1), int(-1), int(-3), int(3), int(-1), int(1)];
    expected.sort();
    assert_eq!(coefficients, expected);
}

#[test]
fn b21_without_genus_one_psi() {
    let twelve_b = eliminate_genus1_psi(&b("2,1")).unwrap().scale(&int(12));
    assert_eq!(fixture("b2_1_21_genus0").len(), 5);
    assert_zero(
        certify_equal(&twelve_b, &fixture("b2_1_21_genus0"), &SpanBudget::default()).unwrap(),
        "12 B against its genus-0 form",
    );
}

#[test]
fn b21_factors_through_f() {
    let twelve_b = b("2,1").scale(&int(12));
    assert_zero(
        certify_equal(&twelve_b, &fixture("f_v12"), &SpanBudget::default()).unwrap(),
        "12 B against f <g2 V1 V2>_0",
    );
    assert_zero(prove_zero(&fixture("f"), &SpanBudget::default()).unwrap(), "f");
}

#[test]
fn b21_vanishes() {
    assert_zero(prove_zero(&b("2,1"), &SpanBudget::default()).unwrap(), "B^2_{1,(2,1)}");
}

#[test]
fn b111_splits_as_h_plus_i() {
    let hi = fixture("h").add(&fixture("v12_i")).unwrap();
    assert_zero(
        certify_equal(&b("1,1,1"), &hi, &SpanBudget::default()).unwrap(),
        "B^2_{1,(1,1,1)} against H + <V1 V2 g>_0 I",
    );
}

#[test]
fn h1_and_i1_vanish() {
    assert_zero(prove_zero(&fixture("h1"), &SpanBudget::default()).unwrap(), "H1");
    assert_zero(prove_zero(&fixture("i1"), &SpanBudget::default()).unwrap(), "I1");
}

#[test]
fn genus_zero_remainder_of_b111_vanishes() {
    let six = fixture("h0_v12_i0").scale(&q(1, 2));
    assert_zero(
        prove_zero(&six, &SpanBudget::default()).unwrap(),
        "6(H0 + <V1 V2 g>_0 I0)",
    );
}

#[test]
fn b111_vanishes() {
    assert_zero(
        prove_zero(&b("1,1,1"), &SpanBudget::default()).unwrap(),
        "B^2_{1,(1,1,1)}",
    );
}

#[test]
fn psi_identities() {
    for name in ["psi11_m05", "psi21_m14", "psi2_m13", "psi11_m13", "psi11_m06_loop"] {
        let e = fixture(name);
        assert_zero(prove_zero(&e, &SpanBudget::default()).unwrap(), name);
        assert!(
            pair_with_psi_monomials(&e).unwrap().iter().all(|(_, v)| v.is_zero()),
            "{name}"
        );
    }
}

#[test]
fn perturbed_fixtures_are_not_certified() {
    for name in ["f", "h1", "i1", "psi11_m13"] {
        let e = fixture(name);
        let t = e.terms().next().unwrap();
        let mut bad = e.clone();
        bad.add_term(t.coefficient.clone(), &t.graph).unwrap();
        assert!(!prove_zero(&bad, &SpanBudget::default()).unwrap().is_zero(), "{name}");
    }
}

#[test]
fn partner_choice_does_not_matter_modulo_wdvv() {
    let e = tautrel::expr::parse_bracket("<P^2(U1) V1 V2 U2 U3 U4>_0").unwrap();
    let t = e.terms().next().unwrap();
    let g = t.graph.graph();
    let target = g.leg_of(LegLabel::Regular(1)).unwrap();
    let vertex = g.vertex_of(target);
    let legs: Vec<usize> = [
        LegLabel::Frozen(1),
        LegLabel::Frozen(2),
        LegLabel::Regular(3),
        LegLabel::Regular(4),
    ]
    .into_iter()
    .map(|l| g.leg_of(l).unwrap())
    .collect();
    let mut results = Vec::new();
    for (a, b) in [(legs[0], legs[1]), (legs[2], legs[3]), (legs[0], legs[3])] {
        let step = psi_reduce_genus0(e.ambient(), t, vertex, target, (a, b)).unwrap();
        results.push(eliminate_all_psi(&step).unwrap());
    }
    for r in &results[1..] {
        let v = certify_equal(&results[0], r, &SpanBudget::default()).unwrap();
        assert!(v.is_zero(), "{}", v.label());
    }
    assert!(pair_with_psi_monomials(&e).unwrap().iter().any(|(_, v)| !v.is_zero()));
    assert_eq!(
        pair_with_psi_monomials(&e).unwrap(),
        pair_with_psi_monomials(&results[1]).unwrap()
    );
}
