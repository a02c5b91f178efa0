//! Span test: is a ψ-free expression a rational combination of WDVV
//! relations?
//!
//! Terms are grouped by their core (the graph left after contracting every
//! edge between ψ-free genus-0 vertices). WDVV relations never mix cores, so
//! each block is solved on its own by sparse exact elimination.

use super::wdvv::{core_key, generate_wdvv_relations, RelationBasis, SpanBudget};
use super::ReduceError;
use crate::expr::{Expression, ExpressionJson, Rational, RationalJson};
use crate::graph::CanonicalKey;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZeroCertificate {
    /// `e = Σ c · relations[i]` over the listed `(c, i)`.
    Zero(Vec<(Rational, usize)>),
    /// Not in the span of the relations generated within the budget.
    Unknown { rounds: u32, relations: usize },
}

impl ZeroCertificate {
    pub fn is_zero(&self) -> bool {
        matches!(self, ZeroCertificate::Zero(_))
    }
}

type SparseRow = BTreeMap<usize, Rational>;

struct Echelon {
    /// Rows keyed by their leading column.
    rows: BTreeMap<usize, (SparseRow, SparseRow)>,
}

fn axpy(target: &mut SparseRow, c: &Rational, row: &SparseRow) {
    for (&k, v) in row {
        let entry = target.entry(k).or_insert_with(Rational::zero);
        *entry += c * v;
        if entry.is_zero() {
            target.remove(&k);
        }
    }
}

impl Echelon {
    fn new() -> Self {
        Echelon { rows: BTreeMap::new() }
    }

    /// Reduces `row` (with its relation combination `comb`) by leading
    /// columns. Returns the leftover, empty if `row` lies in the span.
    fn reduce(&self, row: &mut SparseRow, comb: &mut SparseRow) {
        while let Some((&lead, value)) = row.iter().next() {
            let Some((prow, pcomb)) = self.rows.get(&lead) else {
                return;
            };
            let c = -(value / &prow[&lead]);
            axpy(row, &c, prow);
            axpy(comb, &c, pcomb);
        }
    }

    fn insert(&mut self, mut row: SparseRow, mut comb: SparseRow) {
        self.reduce(&mut row, &mut comb);
        if let Some(&lead) = row.keys().next() {
            self.rows.insert(lead, (row, comb));
        }
    }
}

fn keys_to_columns<'a>(keys: impl Iterator<Item = &'a CanonicalKey>, columns: &mut BTreeMap<CanonicalKey, usize>) {
    for k in keys {
        let n = columns.len();
        columns.entry(k.clone()).or_insert(n);
    }
}

fn as_row(e: &Expression, columns: &BTreeMap<CanonicalKey, usize>) -> SparseRow {
    e.keyed_terms()
        .map(|(k, t)| (columns[k], t.coefficient.clone()))
        .collect()
}

/// Solves one core block; on success returns the combination over
/// `basis.relations`.
fn solve_block(target: &Expression, basis: &RelationBasis) -> Option<SparseRow> {
    let mut columns = BTreeMap::new();
    keys_to_columns(target.keys(), &mut columns);
    for r in &basis.relations {
        keys_to_columns(r.keys(), &mut columns);
    }
    let mut ech = Echelon::new();
    for (i, r) in basis.relations.iter().enumerate() {
        ech.insert(as_row(r, &columns), SparseRow::from([(i, Rational::one())]));
    }
    let mut row = as_row(target, &columns);
    let mut comb = SparseRow::new();
    ech.reduce(&mut row, &mut comb);
    // row = target + Σ comb·R, so target = −Σ comb·R.
    row.is_empty().then(|| comb.into_iter().map(|(i, c)| (i, -c)).collect())
}

/// Tries to write a ψ-free `e` as a combination of WDVV relations.
pub fn span_zero_test(e: &Expression, budget: &SpanBudget) -> Result<(ZeroCertificate, RelationBasis), ReduceError> {
    if !e.is_psi_free() {
        return Err(ReduceError::NotPsiFree);
    }
    let ambient = e.ambient().clone();
    let mut blocks: BTreeMap<CanonicalKey, Expression> = BTreeMap::new();
    for (_, t) in e.keyed_terms() {
        blocks
            .entry(core_key(&t.graph))
            .or_insert_with(|| Expression::zero(ambient.clone()))
            .add_term(t.coefficient.clone(), &t.graph)?;
    }
    let mut all = RelationBasis::empty(ambient.clone());
    let mut combination = Vec::new();
    let mut solved = true;
    for block in blocks.values() {
        let support: BTreeSet<CanonicalKey> = block.keys().cloned().collect();
        let basis = generate_wdvv_relations(&ambient, &support, budget)?;
        if budget.max_relations < all.relations.len() + basis.relations.len() {
            return Err(ReduceError::RelationOverflow(budget.max_relations));
        }
        let offset = all.relations.len();
        match solve_block(block, &basis) {
            Some(comb) if solved => combination.extend(comb.into_iter().map(|(i, c)| (c, i + offset))),
            Some(_) => {}
            None => solved = false,
        }
        all.support.extend(basis.support);
        all.relations.extend(basis.relations);
    }
    let cert = if solved {
        ZeroCertificate::Zero(combination)
    } else {
        ZeroCertificate::Unknown {
            rounds: budget.rounds,
            relations: all.relations.len(),
        }
    };
    Ok((cert, all))
}

/// Recomputes Σ c·R from the certificate and compares with `e`.
pub fn replay(e: &Expression, cert: &ZeroCertificate, basis: &RelationBasis) -> bool {
    let ZeroCertificate::Zero(comb) = cert else {
        return false;
    };
    let mut sum = Expression::zero(e.ambient().clone());
    for (c, i) in comb {
        let Some(r) = basis.relations.get(*i) else {
            return false;
        };
        if sum.add_scaled(r, c).is_err() {
            return false;
        }
    }
    sum.sub(e).map(|d| d.is_zero()).unwrap_or(false)
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateEntryJson {
    pub coefficient: RationalJson,
    pub relation: ExpressionJson,
}

pub fn certificate_json(cert: &ZeroCertificate, basis: &RelationBasis) -> Option<Vec<CertificateEntryJson>> {
    let ZeroCertificate::Zero(comb) = cert else {
        return None;
    };
    Some(
        comb.iter()
            .map(|(c, i)| CertificateEntryJson {
                coefficient: RationalJson::from(c),
                relation: ExpressionJson::from(&basis.relations[*i]),
            })
            .collect(),
    )
}
