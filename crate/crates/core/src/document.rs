//! JSON curve documents with exact numeric fields.
//!
//! Numbers may be JSON numbers or strings such as `"7/15"` or `"-0.25"`.
//! JSON numbers are read through their shortest decimal text, so `0.1`
//! becomes exactly `1/10`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bspline::{KnotVector, NurbsCurve};
use crate::error::{Error, Result};
use crate::ratpoly::{format_rational, parse_rational, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberText {
    Number(serde_json::Number),
    Text(String),
}

impl NumberText {
    pub fn parse(&self) -> Result<Rational> {
        match self {
            NumberText::Number(n) => parse_rational(&n.to_string()),
            NumberText::Text(s) => parse_rational(s),
        }
    }
}

impl From<&Rational> for NumberText {
    fn from(r: &Rational) -> Self {
        NumberText::Text(format_rational(r))
    }
}

impl fmt::Display for NumberText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumberText::Number(n) => write!(f, "{n}"),
            NumberText::Text(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub degree: usize,
    pub knots: Vec<NumberText>,
    pub control_points: Vec<[NumberText; 2]>,
    pub weights: Vec<NumberText>,
}

fn field(name: &str, index: usize, value: &NumberText) -> Result<Rational> {
    value.parse().map_err(|_| {
        Error::validation(format!("{name}[{index}]"), format!("cannot parse {value:?} as a number"))
    })
}

impl CurveDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve documents always serialize")
    }

    /// Validates the document and builds the exact curve.
    pub fn to_curve(&self) -> Result<NurbsCurve<Rational>> {
        let knots = self
            .knots
            .iter()
            .enumerate()
            .map(|(i, v)| field("knots", i, v))
            .collect::<Result<Vec<_>>>()?;
        let points = self
            .control_points
            .iter()
            .enumerate()
            .map(|(i, [x, y])| {
                Ok([
                    field(&format!("control_points[{i}]"), 0, x)?,
                    field(&format!("control_points[{i}]"), 1, y)?,
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, v)| field("weights", i, v))
            .collect::<Result<Vec<_>>>()?;
        let knots = KnotVector::new(knots).map_err(|e| Error::validation("knots", e.to_string()))?;
        NurbsCurve::new(self.degree, knots, points, weights)
    }

    pub fn from_curve(curve: &NurbsCurve<Rational>, name: Option<String>) -> Self {
        Self {
            name,
            degree: curve.degree(),
            knots: curve.knots().as_slice().iter().map(NumberText::from).collect(),
            control_points: curve
                .control_points()
                .iter()
                .map(|[x, y]| [x.into(), y.into()])
                .collect(),
            weights: curve.weights().iter().map(NumberText::from).collect(),
        }
    }
}
