//! Reduction of tautological expressions: ψ-elimination, WDVV span tests
//! and integration.

mod integrate;
mod psi;
mod span;
mod wdvv;

pub use integrate::{integrate, pair_with_psi_monomials, Integrator};
pub use psi::{
    default_partners, distribute, eliminate_all_psi, eliminate_genus1_psi, psi_reduce_genus0, psi_reduce_genus1,
};
pub use span::{certificate_json, replay, span_zero_test, CertificateEntryJson, ZeroCertificate};
pub use wdvv::{generate_wdvv_relations, wdvv_relations_at, RelationBasis, SpanBudget};

use crate::expr::{ExprError, Expression, Rational};
use crate::graph::LegLabel;
use num_traits::Zero;

#[derive(Debug, thiserror::Error)]
pub enum ReduceError {
    #[error("vertex {vertex} has genus {found}, expected {expected}")]
    WrongGenus { vertex: usize, expected: u32, found: u32 },
    #[error("expression still carries extra legs")]
    ExtraLegs,
    #[error("half-edge {half_edge} is not at vertex {vertex}")]
    NotAtVertex { half_edge: usize, vertex: usize },
    #[error("half-edge {0} carries no ψ-class")]
    NoPsi(usize),
    #[error("genus-0 vertex {vertex} is trivalent; its ψ-classes vanish")]
    TrivalentGenus0 { vertex: usize },
    #[error("partner half-edges must be two distinct other half-edges at the vertex")]
    BadPartners,
    #[error("ψ-classes on genus-{0} vertices are not supported")]
    HigherGenus(u32),
    #[error("leg {0} already exists")]
    NameCollision(LegLabel),
    #[error("expression is not ψ-free")]
    NotPsiFree,
    #[error("term of degree {degree} in an ambient space of dimension {dimension}")]
    DegreeMismatch { degree: i64, dimension: i64 },
    #[error("more than {0} relations needed; raise the budget")]
    RelationOverflow(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// How a zero (or nonzero) verdict was reached.
#[derive(Clone, Debug)]
pub enum Verdict {
    /// The expression normalizes to no terms.
    Empty,
    /// Top-degree expression with vanishing integral.
    ZeroIntegral,
    /// The ψ-free form is a combination of WDVV relations.
    Certified {
        psi_free: Expression,
        certificate: ZeroCertificate,
        basis: RelationBasis,
    },
    /// Pairing with the ψ-monomial `exponents` gives `value` ≠ 0.
    NonZero { exponents: Vec<u32>, value: Rational },
    /// Neither route decided within the budget.
    Unknown {
        psi_free: Expression,
        rounds: u32,
        relations: usize,
    },
}

impl Verdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, Verdict::Empty | Verdict::ZeroIntegral | Verdict::Certified { .. })
    }

    pub fn is_nonzero(&self) -> bool {
        matches!(self, Verdict::NonZero { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Empty => "zero (no terms)",
            Verdict::ZeroIntegral => "zero (top degree, integral vanishes)",
            Verdict::Certified { .. } => "zero (WDVV certificate)",
            Verdict::NonZero { .. } => "nonzero",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

/// Tries to prove `e = 0` in the tautological ring.
///
/// Top-degree classes are integrated. Otherwise ψ-classes are eliminated and
/// the ψ-free result is tested against the WDVV span. If that fails, pairing
/// with ψ-monomials may still exhibit the class as nonzero.
pub fn prove_zero(e: &Expression, budget: &SpanBudget) -> Result<Verdict, ReduceError> {
    if e.is_zero() {
        return Ok(Verdict::Empty);
    }
    if e.degree() == Some(e.ambient().dimension()) && e.ambient().extra() == 0 {
        let value = integrate(e)?;
        return Ok(if value.is_zero() {
            Verdict::ZeroIntegral
        } else {
            Verdict::NonZero {
                exponents: vec![0; e.ambient().labels().len()],
                value,
            }
        });
    }
    let psi_free = eliminate_all_psi(e)?;
    if psi_free.is_zero() {
        return Ok(Verdict::Certified {
            basis: RelationBasis::empty(psi_free.ambient().clone()),
            psi_free,
            certificate: ZeroCertificate::Zero(Vec::new()),
        });
    }
    let (certificate, basis) = span_zero_test(&psi_free, budget)?;
    if let ZeroCertificate::Unknown { rounds, relations } = certificate {
        if let Ok(pairs) = pair_with_psi_monomials(e) {
            if let Some((exponents, value)) = pairs.into_iter().find(|(_, v)| !v.is_zero()) {
                return Ok(Verdict::NonZero { exponents, value });
            }
        }
        return Ok(Verdict::Unknown {
            psi_free,
            rounds,
            relations,
        });
    }
    Ok(Verdict::Certified {
        psi_free,
        certificate,
        basis,
    })
}

/// Tries to prove `a = b` by proving `a − b = 0`.
pub fn certify_equal(a: &Expression, b: &Expression, budget: &SpanBudget) -> Result<Verdict, ReduceError> {
    prove_zero(&a.sub(b)?, budget)
}
