use crate::error::{Error, Result};
use crate::ratpoly::Scalar;

use super::knots::KnotVector;

pub type Point<S> = [S; 2];

/// Planar NURBS curve `phi(u) = sum w_i P_i N_{i,d}(u) / sum w_i N_{i,d}(u)`
/// on a clamped knot vector.
#[derive(Clone, Debug, PartialEq)]
pub struct NurbsCurve<S> {
    degree: usize,
    knots: KnotVector<S>,
    points: Vec<Point<S>>,
    weights: Vec<S>,
}

impl<S: Scalar> NurbsCurve<S> {
    pub fn new(
        degree: usize,
        knots: KnotVector<S>,
        points: Vec<Point<S>>,
        weights: Vec<S>,
    ) -> Result<Self> {
        if degree == 0 {
            return Err(Error::validation("degree", "must be at least 1"));
        }
        let expected = knots.len().checked_sub(degree + 1).unwrap_or(0);
        if expected == 0 || points.len() != expected {
            return Err(Error::validation(
                "control_points",
                format!(
                    "expected {expected} control points for {} knots of degree {degree}, found {}",
                    knots.len(),
                    points.len()
                ),
            ));
        }
        if weights.len() != points.len() {
            return Err(Error::validation(
                "weights",
                format!("expected {} weights, found {}", points.len(), weights.len()),
            ));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::validation(format!("weights[{i}]"), "weight must be positive"));
        }
        if !knots.is_clamped(degree) {
            return Err(Error::validation(
                "knots",
                format!("end knots must each have multiplicity {}", degree + 1),
            ));
        }
        let (values, mults) = knots.reduced();
        for (j, m) in mults.iter().enumerate().skip(1).take(mults.len().saturating_sub(2)) {
            if *m > degree + 1 {
                return Err(Error::validation(
                    "knots",
                    format!("inner knot {} has multiplicity {m} > {}", values[j], degree + 1),
                ));
            }
        }
        Ok(Self {
            degree,
            knots,
            points,
            weights,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &KnotVector<S> {
        &self.knots
    }

    pub fn control_points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn domain(&self) -> (S, S) {
        (self.knots.first().clone(), self.knots.last().clone())
    }

    /// Homogeneous value `(f0, f1, f2)(u) = sum w_i (1, x_i, y_i) N_{i,d}(u)`.
    pub fn homogeneous(&self, u: &S) -> Result<[S; 3]> {
        let span = self.knots.span(u)?;
        let mut h = [S::zero(), S::zero(), S::zero()];
        for i in span - self.degree..=span {
            let n = self.knots.basis(self.degree, i, u)?;
            if n.is_zero() {
                continue;
            }
            let wn = self.weights[i].clone() * n;
            h[0] = h[0].clone() + wn.clone();
            h[1] = h[1].clone() + wn.clone() * self.points[i][0].clone();
            h[2] = h[2].clone() + wn * self.points[i][1].clone();
        }
        Ok(h)
    }

    pub fn eval(&self, u: &S) -> Result<Point<S>> {
        let [w, x, y] = self.homogeneous(u)?;
        Ok([x / w.clone(), y / w])
    }

    /// Point, first and second derivative at `u`.
    pub fn eval_derivatives(&self, u: &S) -> Result<[Point<S>; 3]> {
        let span = self.knots.span(u)?;
        let mut h = [[S::zero(), S::zero(), S::zero()], [S::zero(), S::zero(), S::zero()], [
            S::zero(),
            S::zero(),
            S::zero(),
        ]];
        for i in span - self.degree..=span {
            for (order, hh) in h.iter_mut().enumerate() {
                let n = self.knots.basis_derivative(self.degree, i, u, order)?;
                let wn = self.weights[i].clone() * n;
                hh[0] = hh[0].clone() + wn.clone();
                hh[1] = hh[1].clone() + wn.clone() * self.points[i][0].clone();
                hh[2] = hh[2].clone() + wn * self.points[i][1].clone();
            }
        }
        let w = h[0][0].clone();
        let (w1, w2) = (h[1][0].clone(), h[2][0].clone());
        let two = S::from_int(2);
        let mut out = [
            [S::zero(), S::zero()],
            [S::zero(), S::zero()],
            [S::zero(), S::zero()],
        ];
        for c in 0..2 {
            let p = h[0][c + 1].clone() / w.clone();
            let p1 = (h[1][c + 1].clone() - w1.clone() * p.clone()) / w.clone();
            let p2 = (h[2][c + 1].clone()
                - two.clone() * w1.clone() * p1.clone()
                - w2.clone() * p.clone())
                / w.clone();
            out[0][c] = p;
            out[1][c] = p1;
            out[2][c] = p2;
        }
        Ok(out)
    }

    pub fn cast<T: Scalar>(&self) -> NurbsCurve<T> {
        NurbsCurve {
            degree: self.degree,
            knots: self.knots.cast(),
            points: self
                .points
                .iter()
                .map(|[x, y]| [x.cast(), y.cast()])
                .collect(),
            weights: self.weights.iter().map(|w| w.cast()).collect(),
        }
    }
}
