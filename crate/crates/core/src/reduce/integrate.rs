//! Integrals of top-degree tautological expressions.
//!
//! A decorated stratum integrates to the product of its vertex integrals.
//! Genus-0 vertices use the multinomial formula; genus-1 vertices are
//! reduced by the string and dilaton equations down to ∫ψ = 1/24 on
//! Mbar_{1,1}.

use super::ReduceError;
use crate::expr::{q, Expression, Rational};
use crate::graph::DecoratedGraph;
use crate::pushforward::factorial;
use num_traits::{One, Zero};
use std::collections::HashMap;

#[derive(Debug, Default)]
pub struct Integrator {
    genus1: HashMap<Vec<u32>, Rational>,
}

impl Integrator {
    pub fn new() -> Self {
        Self::default()
    }

    /// ∫ ∏ ψ_i^{q_i} over Mbar_{g,n}, n = q.len().
    pub fn vertex_integral(&mut self, genus: u32, q: &[u32]) -> Result<Rational, ReduceError> {
        let n = q.len() as i64;
        let total: i64 = q.iter().map(|&x| x as i64).sum();
        if 3 * genus as i64 - 3 + n != total || 2 * genus as i64 - 2 + n <= 0 {
            return Ok(Rational::zero());
        }
        match genus {
            0 => {
                let denom: num_bigint::BigInt = q.iter().map(|&x| factorial(x)).product();
                Ok(Rational::new(factorial((n - 3) as u32), denom))
            }
            1 => {
                let mut key = q.to_vec();
                key.sort_unstable();
                Ok(self.genus1(key))
            }
            g => Err(ReduceError::HigherGenus(g)),
        }
    }

    fn genus1(&mut self, m: Vec<u32>) -> Rational {
        if let Some(r) = self.genus1.get(&m) {
            return r.clone();
        }
        let n = m.len();
        let value = if m == [1] {
            q(1, 24)
        } else if m[0] == 0 {
            // String equation; m is sorted so position 0 holds a zero.
            let rest = &m[1..];
            let mut sum = Rational::zero();
            for j in 0..rest.len() {
                if rest[j] > 0 {
                    let mut r = rest.to_vec();
                    r[j] -= 1;
                    r.sort_unstable();
                    sum += self.genus1(r);
                }
            }
            sum
        } else if let Some(i) = m.iter().position(|&x| x == 1) {
            // Dilaton equation: factor 2g − 2 + (n − 1).
            let mut r = m.clone();
            r.remove(i);
            Rational::from_integer((n as i64 - 1).into()) * self.genus1(r)
        } else {
            // Unreachable for a dimensionally correct genus-1 monomial.
            Rational::zero()
        };
        self.genus1.insert(m, value.clone());
        value
    }

    pub fn integrate_graph(&mut self, g: &DecoratedGraph) -> Result<Rational, ReduceError> {
        let dg = g.graph();
        let mut out = Rational::one();
        for v in 0..dg.num_vertices() {
            let mut q: Vec<u32> = dg
                .half_edges_at(v)
                .iter()
                .map(|&h| g.exponent(h).max(0) as u32)
                .collect();
            q.extend(std::iter::repeat_n(0, dg.vertex(v).extra_legs as usize));
            out *= self.vertex_integral(dg.vertex(v).genus, &q)?;
            if out.is_zero() {
                break;
            }
        }
        Ok(out)
    }

    pub fn integrate(&mut self, e: &Expression) -> Result<Rational, ReduceError> {
        let dimension = e.ambient().dimension();
        let mut sum = Rational::zero();
        for t in e.terms() {
            let degree = t.graph.degree();
            if degree != dimension {
                return Err(ReduceError::DegreeMismatch { degree, dimension });
            }
            sum += &t.coefficient * self.integrate_graph(&t.graph)?;
        }
        Ok(sum)
    }
}

/// ∫ e over its ambient space; `e` must have top degree.
pub fn integrate(e: &Expression) -> Result<Rational, ReduceError> {
    Integrator::new().integrate(e)
}

/// All exponent vectors of length `n` summing to `total`, lexicographic.
fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur[i] = x;
            rec(i + 1, left - x, cur, out);
        }
    }
    if n == 0 {
        if total == 0 {
            out.push(cur);
        }
    } else {
        rec(0, total, &mut cur, &mut out);
    }
    out
}

/// Pairs `e` with every ψ-monomial on the marked points of complementary
/// degree. Exponents follow the order of `e.ambient().labels()`. A nonzero
/// entry shows that `e` is a nonzero class.
pub fn pair_with_psi_monomials(e: &Expression) -> Result<Vec<(Vec<u32>, Rational)>, ReduceError> {
    let ambient = e.ambient();
    if ambient.extra() > 0 {
        return Err(ReduceError::ExtraLegs);
    }
    let Some(degree) = e.degree() else {
        return Ok(Vec::new());
    };
    let complement = ambient.dimension() - degree;
    if complement < 0 {
        return Ok(Vec::new());
    }
    let labels = ambient.labels();
    let mut integrator = Integrator::new();
    let mut out = Vec::new();
    for exps in compositions(labels.len(), complement as u32) {
        let mut f = e.clone();
        for (&label, &k) in labels.iter().zip(&exps) {
            if k > 0 {
                f = f.multiply_by_leg_psi(label, k)?;
            }
        }
        let value = if f.is_zero() {
            Rational::zero()
        } else {
            integrator.integrate(&f)?
        };
        out.push((exps, value));
    }
    Ok(out)
}
