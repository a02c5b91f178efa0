use super::{AmbientSpace, ExprError, Expression, Rational};
use crate::graph::{DecoratedGraph, DecoratedGraphJson, LegJson, LegLabel};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// Exact rational as decimal strings, so that arbitrary sizes survive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalJson {
    fn from(r: &Rational) -> Self {
        RationalJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

impl TryFrom<&RationalJson> for Rational {
    type Error = String;

    fn try_from(j: &RationalJson) -> Result<Self, String> {
        let num: BigInt = j.num.parse().map_err(|_| format!("bad numerator {:?}", j.num))?;
        let den: BigInt = j.den.parse().map_err(|_| format!("bad denominator {:?}", j.den))?;
        if den == BigInt::from(0) {
            return Err("zero denominator".into());
        }
        Ok(Rational::new(num, den))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientJson {
    pub genus: u32,
    pub labels: Vec<LegJson>,
    #[serde(default)]
    pub extra: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coefficient: RationalJson,
    pub graph: DecoratedGraphJson,
}

/// Wire form of an [`Expression`]. Coefficients are internal (not
/// Aut-normalized); `bracket` is informational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpressionJson {
    pub ambient: AmbientJson,
    pub terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bracket: Option<String>,
}

impl From<&Expression> for ExpressionJson {
    fn from(e: &Expression) -> Self {
        let a = e.ambient();
        ExpressionJson {
            ambient: AmbientJson {
                genus: a.genus(),
                labels: a
                    .labels()
                    .iter()
                    .map(|l| LegJson {
                        id: 0,
                        kind: if l.is_frozen() { "frozen" } else { "regular" }.into(),
                        index: l.index(),
                    })
                    .collect(),
                extra: a.extra(),
            },
            terms: e
                .terms()
                .map(|t| TermJson {
                    coefficient: (&t.coefficient).into(),
                    graph: (&t.graph).into(),
                })
                .collect(),
            bracket: Some(e.render_bracket()),
        }
    }
}

impl TryFrom<&ExpressionJson> for Expression {
    type Error = ExprError;

    fn try_from(j: &ExpressionJson) -> Result<Self, ExprError> {
        let labels = j
            .ambient
            .labels
            .iter()
            .map(|l| match l.kind.as_str() {
                "frozen" => LegLabel::Frozen(l.index),
                _ => LegLabel::Regular(l.index),
            })
            .collect();
        let ambient = AmbientSpace::with_extra(j.ambient.genus, labels, j.ambient.extra)?;
        let mut e = Expression::zero(ambient.clone());
        for t in &j.terms {
            let c = Rational::try_from(&t.coefficient).map_err(|reason| ExprError::WrongAmbient {
                ambient: ambient.clone(),
                reason,
            })?;
            let g = DecoratedGraph::try_from(&t.graph)?;
            e.add_term(c, &g)?;
        }
        Ok(e)
    }
}

impl Expression {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ExpressionJson::from(self)).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, ExprError> {
        let j: ExpressionJson = serde_json::from_value(v.clone()).map_err(|err| {
            ExprError::Parse(super::ParseError {
                position: 0,
                message: err.to_string(),
            })
        })?;
        Expression::try_from(&j)
    }
}
