//! The angle-bracket notation for boundary classes.
//!
//! ```text
//! expression := term (('+' | '-') term)*  |  '0'
//! term       := [rational ['*']] factor+
//! factor     := ('<' | '⟨') item* ('>' | '⟩') '_' genus
//! item       := name | psi ['^' k] '(' name ')'
//! ```
//!
//! `psi` is `P`, `Psi` or `Ψ`. Names `U<i>` and `x<i>` are regular legs,
//! `V<i>` frozen legs, `W` or `W<i>` extra legs. Any other name is a
//! half-edge and must occur exactly twice, once plain and once with a
//! trailing `*`; the two occurrences form an edge (a self-edge when they
//! share a factor). Unicode subscript digits are read as ASCII digits.
//!
//! A bracket term with coefficient c denotes c/|Aut Γ| · ξ_Γ*(∏ψ^q), so the
//! stored coefficient is c/|Aut Γ|.

use super::{int, AmbientSpace, ExprError, Expression, Rational};
use crate::graph::{DecoratedGraph, GraphBuilder, LegLabel};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    /// Character offset into the input.
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at column {}: {}", self.position + 1, self.message)
    }
}

/// A parsed term before normalization; `coefficient` is in bracket
/// normalization.
#[derive(Clone, Debug)]
pub struct RawTerm {
    pub coefficient: Rational,
    pub graph: DecoratedGraph,
}

pub fn parse_bracket_terms(text: &str) -> Result<Vec<RawTerm>, ParseError> {
    let mut p = Parser {
        chars: text.chars().map(normalize_char).collect(),
        pos: 0,
    };
    p.expression()
}

/// Parses an expression, taking the ambient space from the first term.
pub fn parse_bracket(text: &str) -> Result<Expression, ExprError> {
    let terms = parse_bracket_terms(text)?;
    let first = terms.first().ok_or_else(|| ParseError {
        position: 0,
        message: "cannot infer the moduli space of an empty expression".into(),
    })?;
    let g = first.graph.graph();
    let ambient = AmbientSpace::with_extra(
        g.genus(),
        g.legs().into_iter().map(|(_, l)| l).collect(),
        g.total_extra_legs(),
    )?;
    collect(ambient, terms)
}

pub fn parse_bracket_in(text: &str, ambient: &AmbientSpace) -> Result<Expression, ExprError> {
    collect(ambient.clone(), parse_bracket_terms(text)?)
}

fn collect(ambient: AmbientSpace, terms: Vec<RawTerm>) -> Result<Expression, ExprError> {
    let mut e = Expression::zero(ambient);
    for t in terms {
        let aut = int(t.graph.automorphism_order() as i64);
        e.add_term(t.coefficient / aut, &t.graph)?;
    }
    Ok(e)
}

fn normalize_char(c: char) -> char {
    match c {
        '₀'..='₉' => char::from_digit(c as u32 - '₀' as u32, 10).unwrap(),
        '⟨' => '<',
        '⟩' => '>',
        '−' => '-',
        '∗' => '*',
        _ => c,
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

enum Name {
    Leg(LegLabel),
    Extra,
    Half { base: String, starred: bool },
}

struct Item {
    name: Name,
    exponent: i32,
    position: usize,
}

impl Parser {
    fn err<T>(&self, position: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() || c == '·' => self.pos += 1,
                // `#` starts a comment running to the end of the line.
                Some('#') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.pos += 1;
                    }
                }
                _ => return,
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expression(&mut self) -> Result<Vec<RawTerm>, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek() == Some('0') {
            self.pos += 1;
            self.skip_ws();
            if self.pos == self.chars.len() {
                return Ok(Vec::new());
            }
            self.pos = start;
        }
        let mut terms = Vec::new();
        let mut sign = Rational::one();
        if self.eat('-') {
            sign = -sign;
        } else {
            self.eat('+');
        }
        loop {
            let mut t = self.term()?;
            t.coefficient *= &sign;
            terms.push(t);
            self.skip_ws();
            match self.peek() {
                None => return Ok(terms),
                Some('+') => sign = Rational::one(),
                Some('-') => sign = -Rational::one(),
                Some(c) => return self.err(self.pos, format!("expected '+' or '-', found '{c}'")),
            }
            self.pos += 1;
        }
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().ok()
    }

    fn term(&mut self) -> Result<RawTerm, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut coefficient = Rational::one();
        if let Some(n) = self.integer() {
            let mut d = BigInt::one();
            if self.eat('/') {
                self.skip_ws();
                let at = self.pos;
                d = match self.integer() {
                    Some(d) if !d.is_zero() => d,
                    _ => return self.err(at, "expected a nonzero denominator"),
                };
            }
            coefficient = Rational::new(n, d);
            self.eat('*');
        }
        let mut factors = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() != Some('<') {
                break;
            }
            factors.push(self.factor()?);
        }
        if factors.is_empty() {
            return self.err(self.pos, "expected '<'");
        }
        let graph = build_graph(&factors).map_err(|(position, message)| ParseError {
            position: position.unwrap_or(start),
            message,
        })?;
        Ok(RawTerm { coefficient, graph })
    }

    fn factor(&mut self) -> Result<(Vec<Item>, u32, usize), ParseError> {
        let start = self.pos;
        self.pos += 1;
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('>') => {
                    self.pos += 1;
                    break;
                }
                Some(',') => self.pos += 1,
                None => return self.err(start, "unclosed '<'"),
                _ => items.push(self.item()?),
            }
        }
        let subscript = matches!(self.peek(), Some(c) if c.is_ascii_digit());
        if !subscript && !self.eat('_') {
            return self.err(self.pos, "expected '_' and a genus after '>'");
        }
        let braced = self.eat('{');
        self.skip_ws();
        let at = self.pos;
        let genus = match self.integer() {
            Some(g) => u32::try_from(g).map_err(|_| ParseError {
                position: at,
                message: "genus out of range".into(),
            })?,
            None => return self.err(at, "expected a genus"),
        };
        if braced && !self.eat('}') {
            return self.err(self.pos, "expected '}'");
        }
        Ok((items, genus, start))
    }

    fn starts_with(&self, s: &str) -> bool {
        (self.pos..).zip(s.chars()).all(|(i, c)| self.chars.get(i) == Some(&c))
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        let position = self.pos;
        for prefix in ["Psi", "Ψ", "P"] {
            if self.starts_with(prefix) {
                let after = self.chars.get(self.pos + prefix.chars().count()).copied();
                if matches!(after, Some('^') | Some('(')) {
                    self.pos += prefix.chars().count();
                    return self.psi_item(position);
                }
            }
        }
        let name = self.name()?;
        Ok(Item {
            name,
            exponent: 0,
            position,
        })
    }

    fn psi_item(&mut self, position: usize) -> Result<Item, ParseError> {
        let mut exponent = 1i32;
        if self.eat('^') {
            let braced = self.eat('{');
            self.skip_ws();
            let negative = self.eat('-');
            self.skip_ws();
            let at = self.pos;
            let k = self.integer().and_then(|k| i32::try_from(k).ok()).ok_or(ParseError {
                position: at,
                message: "malformed exponent".into(),
            })?;
            exponent = if negative { -k } else { k };
            if braced && !self.eat('}') {
                return self.err(self.pos, "expected '}' after exponent");
            }
        }
        if !self.eat('(') {
            return self.err(self.pos, "expected '(' after ψ");
        }
        self.skip_ws();
        let name = self.name()?;
        if !self.eat(')') {
            return self.err(self.pos, "expected ')'");
        }
        Ok(Item {
            name,
            exponent,
            position,
        })
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_' || c == '\'') {
            self.pos += 1;
        }
        if start == self.pos {
            let found = self.peek().map_or("end of input".to_string(), |c| format!("'{c}'"));
            return self.err(start, format!("expected a name, found {found}"));
        }
        let base: String = self.chars[start..self.pos].iter().collect();
        let starred = self.peek() == Some('*');
        if starred {
            self.pos += 1;
        }
        let indexed = |prefix: &str| -> Option<u32> {
            base.strip_prefix(prefix)
                .filter(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_digit()))
                .and_then(|s| s.parse().ok())
        };
        if !starred {
            if let Some(i) = indexed("U").or_else(|| indexed("x")) {
                return Ok(Name::Leg(LegLabel::Regular(i)));
            }
            if let Some(i) = indexed("V") {
                return Ok(Name::Leg(LegLabel::Frozen(i)));
            }
            if base == "W" || indexed("W").is_some() {
                return Ok(Name::Extra);
            }
        }
        Ok(Name::Half { base, starred })
    }
}

type BuildError = (Option<usize>, String);

fn build_graph(factors: &[(Vec<Item>, u32, usize)]) -> Result<DecoratedGraph, BuildError> {
    let mut b = GraphBuilder::new();
    let mut halves: BTreeMap<String, [Option<(usize, i32, usize)>; 2]> = BTreeMap::new();
    let mut seen_legs = Vec::new();
    for (items, genus, _) in factors {
        let v = b.add_vertex(*genus);
        for item in items {
            match &item.name {
                Name::Leg(l) => {
                    if seen_legs.contains(l) {
                        return Err((Some(item.position), format!("duplicate leg label {l}")));
                    }
                    seen_legs.push(*l);
                    b.add_leg(v, *l, item.exponent);
                }
                Name::Extra => {
                    if item.exponent != 0 {
                        return Err((Some(item.position), "extra legs carry no ψ-class".into()));
                    }
                    b.vertex_mut(v).extra_legs += 1;
                }
                Name::Half { base, starred } => {
                    let slot = &mut halves.entry(base.clone()).or_default()[usize::from(*starred)];
                    if slot.is_some() {
                        let star = if *starred { "*" } else { "" };
                        let msg = format!("half-edge {base}{star} appears twice");
                        return Err((Some(item.position), msg));
                    }
                    *slot = Some((v, item.exponent, item.position));
                }
            }
        }
    }
    for (base, pair) in &halves {
        match pair {
            [Some((v, a, _)), Some((w, c, _))] => {
                b.add_edge(*v, *a, *w, *c);
            }
            [Some((_, _, at)), None] => return Err((Some(*at), format!("unmatched half-edge {base}: no {base}*"))),
            [None, Some((_, _, at))] => {
                return Err((Some(*at), format!("unmatched half-edge star {base}*: no {base}")))
            }
            [None, None] => unreachable!(),
        }
    }
    b.build().map_err(|e| (None, e.to_string()))
}

#[derive(Clone, Copy)]
pub(super) enum Style {
    Ascii,
    Latex,
}

pub(super) fn render(e: &Expression, style: Style) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (c, g)) in e.bracket_coefficients().into_iter().enumerate() {
        let negative = c.is_negative();
        let abs = c.abs();
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !abs.is_one() {
            match style {
                Style::Ascii => out.push_str(&format!("{abs}*")),
                Style::Latex if abs.is_integer() => out.push_str(&format!("{abs} ")),
                Style::Latex => out.push_str(&format!("\\frac{{{}}}{{{}}} ", abs.numer(), abs.denom())),
            }
        }
        out.push_str(&render_graph(&g, style));
    }
    out
}

/// Vertex order for display: breadth-first from the vertex with the smallest
/// leg label.
fn display_order(g: &DecoratedGraph) -> Vec<usize> {
    let dg = g.graph();
    let n = dg.num_vertices();
    let start = dg.legs().first().map_or(0, |&(h, _)| dg.vertex_of(h));
    let mut order = vec![start];
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for h in dg.half_edges_at(v) {
            let w = dg.vertex_of(dg.partner(h));
            if !seen[w] {
                seen[w] = true;
                order.push(w);
            }
        }
        i += 1;
    }
    order
}

fn render_graph(g: &DecoratedGraph, style: Style) -> String {
    let dg = g.graph();
    let order = display_order(g);
    let single = dg.num_edges() == 1;
    let mut edge_name: BTreeMap<usize, usize> = BTreeMap::new();
    let mut position = vec![0; dg.num_vertices()];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut extra_counter = 0;
    let mut factors = Vec::new();
    for &v in &order {
        let mut incoming = Vec::new();
        let mut outgoing = Vec::new();
        let mut loops = Vec::new();
        let mut legs = Vec::new();
        for h in dg.half_edges_at(v) {
            let p = dg.partner(h);
            if let Some(l) = dg.label(h) {
                legs.push((l, h));
                continue;
            }
            let w = dg.vertex_of(p);
            if w == v {
                if h < p {
                    let k = edge_name.len() + 1;
                    edge_name.insert(h, k);
                    edge_name.insert(p, k);
                    loops.push(half_name(k, single, false, style, g.exponent(h)));
                    loops.push(half_name(k, single, true, style, g.exponent(p)));
                }
            } else if position[w] < position[v] {
                incoming.push(half_name(edge_name[&p], single, true, style, g.exponent(h)));
            } else {
                let k = edge_name.len() + 1;
                edge_name.insert(h, k);
                edge_name.insert(p, k);
                outgoing.push(half_name(k, single, false, style, g.exponent(h)));
            }
        }
        legs.sort();
        let mut items = incoming;
        for (l, h) in legs {
            let name = match (style, l) {
                (Style::Ascii, _) => l.to_string(),
                (Style::Latex, LegLabel::Frozen(i)) => format!("V_{{{i}}}"),
                (Style::Latex, LegLabel::Regular(i)) => format!("U_{{{i}}}"),
            };
            items.push(psi(&name, g.exponent(h), style));
        }
        for _ in 0..dg.vertex(v).extra_legs {
            extra_counter += 1;
            items.push(match style {
                Style::Ascii => format!("W{extra_counter}"),
                Style::Latex => format!("W_{{{extra_counter}}}"),
            });
        }
        items.extend(outgoing);
        items.extend(loops);
        let genus = dg.vertex(v).genus;
        factors.push(match style {
            Style::Ascii => format!("<{}>_{genus}", items.join(" ")),
            Style::Latex => format!("\\langle {} \\rangle_{{{genus}}}", items.join(" ")),
        });
    }
    factors.join(" ")
}

fn half_name(k: usize, single: bool, starred: bool, style: Style, exponent: i32) -> String {
    let name = match (style, single) {
        (Style::Ascii, true) => "g".to_string(),
        (Style::Ascii, false) => format!("g{k}"),
        (Style::Latex, true) => "\\gamma".to_string(),
        (Style::Latex, false) => format!("\\gamma_{{{k}}}"),
    };
    let name = match (starred, style) {
        (false, _) => name,
        (true, Style::Ascii) => format!("{name}*"),
        (true, Style::Latex) => format!("{name}^*"),
    };
    psi(&name, exponent, style)
}

fn psi(name: &str, exponent: i32, style: Style) -> String {
    match (exponent, style) {
        (0, _) => name.to_string(),
        (1, Style::Ascii) => format!("P({name})"),
        (k, Style::Ascii) => format!("P^{k}({name})"),
        (1, Style::Latex) => format!("\\Psi({name})"),
        (k, Style::Latex) => format!("\\Psi^{{{k}}}({name})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::q;

    #[test]
    fn self_edge_bracket_halves_the_coefficient() {
        let e = parse_bracket("⟨x₁ γ γ*⟩₀").unwrap();
        let t = e.terms().next().unwrap();
        assert_eq!(t.coefficient, q(1, 2));
        assert_eq!(e.render_bracket(), "<U1 g g*>_0");
    }

    #[test]
    fn relabelled_edges_give_the_same_class() {
        let a = parse_bracket("<V1 P(g1) g2>_0 <g1* U1 g3>_1 <g2* P^2(U2)>_1 <g3* U3>_1").unwrap();
        let b = parse_bracket("<V1 g P(h)>_0 <h* U1 k>_1 <g* P^2(U2)>_1 <k* U3>_1").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_point_at_the_problem() {
        let err = parse_bracket_terms("<U1 U2 g>_0 <h* U3>_1").unwrap_err();
        assert!(err.message.contains("unmatched"));
        let err = parse_bracket_terms("<U1 U1 U2>_0").unwrap_err();
        assert!(err.message.contains("duplicate"));
        let err = parse_bracket_terms("<P^x(U1) U2 U3>_0").unwrap_err();
        assert!(err.message.contains("malformed exponent"));
        assert_eq!(err.position, 3);
    }

    #[test]
    fn round_trip_of_a_chain() {
        let text = "3/2*<V1 V2 g1>_0 <g1* U1 g2>_0 <g2* P(U2) U3 U4>_0";
        let e = parse_bracket(text).unwrap();
        let again = parse_bracket(&e.render_bracket()).unwrap();
        assert_eq!(e, again);
        assert_eq!(again.render_bracket(), e.render_bracket());
    }

    #[test]
    fn latex_output() {
        let e = parse_bracket("-<V1 V2 g>_0 <g* P^2(U1) U2>_1").unwrap();
        assert_eq!(
            e.render_latex(),
            "-\\langle V_{1} V_{2} \\gamma \\rangle_{0} \\langle \\gamma^* \\Psi^{2}(U_{1}) U_{2} \\rangle_{1}"
        );
    }

    #[test]
    fn zero_and_signs() {
        assert!(parse_bracket_terms("0").unwrap().is_empty());
        let t = parse_bracket_terms("- 2 <U1 U2 U3>_0 + <U1 U2 U3>_0").unwrap();
        assert_eq!(t[0].coefficient, q(-2, 1));
        assert_eq!(t[1].coefficient, q(1, 1));
    }
}
