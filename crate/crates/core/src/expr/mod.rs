//! Formal rational linear combinations of decorated graphs on a fixed moduli
//! space.
//!
//! A stored coefficient `c` on a graph Γ with decoration q stands for
//! `c · ξ_Γ*(∏ ψ^q)`, without the `1/|Aut Γ|` factor of the bracket
//! notation. The bracket parser and renderer convert at the boundary.

mod bracket;
mod json;

pub use bracket::{parse_bracket, parse_bracket_in, parse_bracket_terms, ParseError, RawTerm};
pub use json::{AmbientJson, ExpressionJson, RationalJson, TermJson};

use crate::graph::{canonical_form, CanonicalKey, DecoratedGraph, GraphBuilder, GraphError, LegLabel};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Rational = BigRational;

/// `n/d` as an exact rational.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The moduli space M̄_{g,n}, with its marked points named by leg labels plus
/// a number of anonymous extra points.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AmbientSpace {
    genus: u32,
    labels: Vec<LegLabel>,
    extra: u32,
}

impl AmbientSpace {
    pub fn new(genus: u32, mut labels: Vec<LegLabel>) -> Result<Self, ExprError> {
        labels.sort();
        labels.dedup();
        let a = AmbientSpace {
            genus,
            labels,
            extra: 0,
        };
        a.check_stable()?;
        Ok(a)
    }

    pub fn with_extra(genus: u32, mut labels: Vec<LegLabel>, extra: u32) -> Result<Self, ExprError> {
        labels.sort();
        labels.dedup();
        let a = AmbientSpace { genus, labels, extra };
        a.check_stable()?;
        Ok(a)
    }

    /// M̄_{g, m+n} with frozen legs V1..Vm and regular legs U1..Un.
    pub fn standard(genus: u32, m: u32, n: u32) -> Result<Self, ExprError> {
        let labels = (1..=m)
            .map(LegLabel::Frozen)
            .chain((1..=n).map(LegLabel::Regular))
            .collect();
        Self::new(genus, labels)
    }

    fn check_stable(&self) -> Result<(), ExprError> {
        if 2 * self.genus as i64 - 2 + self.num_points() as i64 > 0 {
            Ok(())
        } else {
            Err(ExprError::UnstableAmbient(self.clone()))
        }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn labels(&self) -> &[LegLabel] {
        &self.labels
    }

    pub fn extra(&self) -> u32 {
        self.extra
    }

    pub fn num_points(&self) -> usize {
        self.labels.len() + self.extra as usize
    }

    pub fn dimension(&self) -> i64 {
        3 * self.genus as i64 - 3 + self.num_points() as i64
    }

    pub fn contains(&self, label: LegLabel) -> bool {
        self.labels.binary_search(&label).is_ok()
    }
}

impl fmt::Display for AmbientSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mbar_{}(", self.genus)?;
        let names: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", names.join(","))?;
        if self.extra > 0 {
            write!(f, "; {} extra", self.extra)?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExprError {
    #[error("ambient spaces differ: {0} vs {1}")]
    AmbientMismatch(AmbientSpace, AmbientSpace),
    #[error("unstable ambient space {0}")]
    UnstableAmbient(AmbientSpace),
    #[error("mixed cohomological degrees {0} and {1}")]
    MixedDegree(i64, i64),
    #[error("graph does not live on {ambient}: {reason}")]
    WrongAmbient { ambient: AmbientSpace, reason: String },
    #[error("leg {0} is not a marked point of the ambient space")]
    UnknownLeg(LegLabel),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coefficient: Rational,
    /// Canonical representative.
    pub graph: DecoratedGraph,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expression {
    ambient: AmbientSpace,
    terms: BTreeMap<CanonicalKey, Term>,
}

impl Expression {
    pub fn zero(ambient: AmbientSpace) -> Self {
        Expression {
            ambient,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_graph(ambient: AmbientSpace, coefficient: Rational, graph: &DecoratedGraph) -> Result<Self, ExprError> {
        let mut e = Self::zero(ambient);
        e.add_term(coefficient, graph)?;
        Ok(e)
    }

    /// Sum of raw terms, normalized.
    pub fn from_terms<'a, I>(ambient: AmbientSpace, terms: I) -> Result<Self, ExprError>
    where
        I: IntoIterator<Item = (Rational, &'a DecoratedGraph)>,
    {
        let mut e = Self::zero(ambient);
        for (c, g) in terms {
            e.add_term(c, g)?;
        }
        Ok(e)
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.values()
    }

    pub fn keyed_terms(&self) -> impl Iterator<Item = (&CanonicalKey, &Term)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &CanonicalKey> {
        self.terms.keys()
    }

    pub fn coefficient_of_key(&self, key: &CanonicalKey) -> Rational {
        self.terms
            .get(key)
            .map_or_else(Rational::zero, |t| t.coefficient.clone())
    }

    pub fn coefficient_of(&self, graph: &DecoratedGraph) -> Rational {
        self.coefficient_of_key(&graph.canonical_key())
    }

    /// Common cohomological degree of the terms; `None` for the empty sum.
    pub fn degree(&self) -> Option<i64> {
        self.terms.values().next().map(|t| t.graph.degree())
    }

    pub fn is_psi_free(&self) -> bool {
        self.terms.values().all(|t| t.graph.is_psi_free())
    }

    /// Checks that `graph` is a stable graph on this ambient space.
    pub fn check_graph(&self, graph: &DecoratedGraph) -> Result<(), ExprError> {
        let g = graph.graph();
        let wrong = |reason: String| ExprError::WrongAmbient {
            ambient: self.ambient.clone(),
            reason,
        };
        let violations = g.validate();
        if !violations.is_empty() {
            return Err(GraphError::Invalid(violations).into());
        }
        if g.genus() != self.ambient.genus {
            return Err(wrong(format!("genus {}", g.genus())));
        }
        let labels: Vec<LegLabel> = g.legs().into_iter().map(|(_, l)| l).collect();
        if labels != self.ambient.labels {
            let names: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
            return Err(wrong(format!("legs {}", names.join(","))));
        }
        if g.total_extra_legs() != self.ambient.extra {
            return Err(wrong(format!("{} extra legs", g.total_extra_legs())));
        }
        if let Some(v) = (0..g.num_vertices()).find(|&v| !g.vertex_is_stable(v)) {
            return Err(wrong(format!("vertex {v} is unstable")));
        }
        Ok(())
    }

    /// Adds `coefficient · graph`. Terms that vanish for degree reasons
    /// (a negative exponent, or more ψ-degree on a vertex than its
    /// dimension) are dropped after validation.
    pub fn add_term(&mut self, coefficient: Rational, graph: &DecoratedGraph) -> Result<(), ExprError> {
        self.check_graph(graph)?;
        if coefficient.is_zero() || graph.has_negative_exponent() || graph.exceeds_vertex_dimension() {
            return Ok(());
        }
        if let Some(d) = self.degree() {
            if d != graph.degree() {
                return Err(ExprError::MixedDegree(d, graph.degree()));
            }
        }
        let cf = canonical_form(graph);
        self.insert_canonical(cf.key, coefficient, cf.graph);
        Ok(())
    }

    fn insert_canonical(&mut self, key: CanonicalKey, coefficient: Rational, graph: DecoratedGraph) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(Term { coefficient, graph });
            }
            Entry::Occupied(mut o) => {
                o.get_mut().coefficient += coefficient;
                if o.get().coefficient.is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Re-applies every normalization rule. Expressions built through the
    /// public API are always normalized, so this is the identity on them.
    pub fn normalize(&self) -> Result<Self, ExprError> {
        Self::from_terms(
            self.ambient.clone(),
            self.terms.values().map(|t| (t.coefficient.clone(), &t.graph)),
        )
    }

    fn check_same_ambient(&self, other: &Expression) -> Result<(), ExprError> {
        if self.ambient != other.ambient {
            return Err(ExprError::AmbientMismatch(self.ambient.clone(), other.ambient.clone()));
        }
        Ok(())
    }

    pub fn add_assign(&mut self, other: &Expression) -> Result<(), ExprError> {
        self.add_scaled(other, &Rational::one())
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &Expression, c: &Rational) -> Result<(), ExprError> {
        self.check_same_ambient(other)?;
        if c.is_zero() {
            return Ok(());
        }
        if let (Some(a), Some(b)) = (self.degree(), other.degree()) {
            if a != b {
                return Err(ExprError::MixedDegree(a, b));
            }
        }
        for (k, t) in &other.terms {
            self.insert_canonical(k.clone(), &t.coefficient * c, t.graph.clone());
        }
        Ok(())
    }

    pub fn add(&self, other: &Expression) -> Result<Self, ExprError> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Expression) -> Result<Self, ExprError> {
        let mut out = self.clone();
        out.add_scaled(other, &-Rational::one())?;
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.ambient.clone());
        }
        let mut out = self.clone();
        for t in out.terms.values_mut() {
            t.coefficient *= c;
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// ψ^power at the leg `label`, pushed inside each boundary term.
    pub fn multiply_by_leg_psi(&self, label: LegLabel, power: u32) -> Result<Self, ExprError> {
        if !self.ambient.contains(label) {
            return Err(ExprError::UnknownLeg(label));
        }
        if power == 0 {
            return Ok(self.clone());
        }
        let mut out = Self::zero(self.ambient.clone());
        for t in self.terms.values() {
            let h = t.graph.graph().leg_of(label).expect("legs match ambient");
            let mut b = GraphBuilder::from_graph(&t.graph);
            b.set_exponent(h, t.graph.exponent(h) + power as i32);
            out.add_term(t.coefficient.clone(), &b.build_unchecked())?;
        }
        Ok(out)
    }

    /// Renames legs through `f` and moves to `ambient`.
    pub fn relabel(&self, ambient: AmbientSpace, f: impl Fn(LegLabel) -> LegLabel) -> Result<Self, ExprError> {
        let mut out = Self::zero(ambient);
        for t in self.terms.values() {
            let mut b = GraphBuilder::from_graph(&t.graph);
            for (h, l) in t.graph.graph().legs() {
                b.set_label(h, f(l));
            }
            out.add_term(t.coefficient.clone(), &b.build_unchecked())?;
        }
        Ok(out)
    }

    /// Applies a linear map term by term and sums the results.
    pub fn map_terms<F>(&self, ambient: AmbientSpace, mut f: F) -> Result<Self, ExprError>
    where
        F: FnMut(&Term) -> Result<Expression, ExprError>,
    {
        let mut out = Self::zero(ambient);
        for t in self.terms.values() {
            out.add_assign(&f(t)?)?;
        }
        Ok(out)
    }

    pub fn render_bracket(&self) -> String {
        bracket::render(self, bracket::Style::Ascii)
    }

    pub fn render_latex(&self) -> String {
        bracket::render(self, bracket::Style::Latex)
    }

    /// Coefficients in bracket normalization (stored coefficient × |Aut|),
    /// keyed like the terms.
    pub fn bracket_coefficients(&self) -> Vec<(Rational, DecoratedGraph)> {
        self.terms
            .values()
            .map(|t| {
                let aut = int(t.graph.automorphism_order() as i64);
                (&t.coefficient * aut, t.graph.clone())
            })
            .collect()
    }

    /// Largest absolute value among numerators and denominators, for reports.
    pub fn max_coefficient_height(&self) -> BigInt {
        self.terms
            .values()
            .flat_map(|t| [t.coefficient.numer().abs(), t.coefficient.denom().clone()])
            .max()
            .unwrap_or_default()
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_bracket())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m05() -> AmbientSpace {
        AmbientSpace::new(0, (1..=5).map(LegLabel::Regular).collect()).unwrap()
    }

    #[test]
    fn cancelling_terms_leave_nothing() {
        let e = parse_bracket("<U1 U2 g> _0 <g* U3 U4 U5>_0").unwrap();
        assert_eq!(e.ambient(), &m05());
        let z = e.sub(&e).unwrap();
        assert!(z.is_zero());
        assert!(e.scale(&int(0)).is_zero());
        assert_eq!(e.add(&Expression::zero(m05())).unwrap(), e);
    }

    #[test]
    fn negative_and_excess_exponents_are_dropped() {
        let e = parse_bracket("<P^-1(U1) U2 U3 U4 g>_0 <g* U5>_1").unwrap();
        assert!(e.is_zero());
        let e = parse_bracket("<P(x1) x2 x3>_0").unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn mixed_degrees_are_rejected() {
        let err = parse_bracket("<P(U1) U2 U3 U4 U5>_0 + <U1 U2 g>_0 <g* U3 U4 U5>_0 + <U1 U2 U3 U4 U5>_0");
        assert!(matches!(err, Err(ExprError::MixedDegree(..))));
    }

    #[test]
    fn leg_psi_multiplication() {
        let e = parse_bracket("<V1 V2 g>_0 <g* U1 U2>_0").unwrap();
        let m = e.multiply_by_leg_psi(LegLabel::Regular(1), 1).unwrap();
        assert_eq!(m, parse_bracket("<V1 V2 g>_0 <g* P(U1) U2>_0").unwrap());
        assert_eq!(e.multiply_by_leg_psi(LegLabel::Regular(1), 0).unwrap(), e);
        let p = parse_bracket("<x1 x2 x3>_0").unwrap();
        assert!(p.multiply_by_leg_psi(LegLabel::Regular(1), 1).unwrap().is_zero());
        assert!(matches!(
            p.multiply_by_leg_psi(LegLabel::Frozen(1), 1),
            Err(ExprError::UnknownLeg(_))
        ));
    }

    #[test]
    fn normalize_is_identity_on_built_expressions() {
        let e = parse_bracket("2*<U1 U2 g>_0 <g* U3 U4 U5>_0 - 1/3*<U1 U3 g>_0 <g* U2 U4 U5>_0").unwrap();
        assert_eq!(e.normalize().unwrap(), e);
    }
}
