use crate::bezier::BezierSegment;
use crate::ratpoly::{BivariatePoly, PolyMatrix, Scalar};

/// Sylvester matrix of `X(t) = f1 - x f0` and `Y(t) = f2 - y f0` for one
/// segment, with entries linear in `(x, y)`.
///
/// Column `c < d` holds `a_0 .. a_d` starting at row `c`; column `d + c`
/// holds `b_0 .. b_d` starting at row `c`. On the curve the row vector
/// `(1, t, ..., t^(2d-1))` is a left kernel vector.
#[derive(Clone, Debug)]
pub struct SylvesterPencil<S> {
    pub segment: BezierSegment<S>,
    pub matrix: PolyMatrix<S>,
}

impl<S: Scalar> SylvesterPencil<S> {
    pub fn degree(&self) -> usize {
        self.segment.degree
    }

    pub fn interval(&self) -> usize {
        self.segment.interval
    }
}

pub fn sylvester<S: Scalar>(seg: &BezierSegment<S>) -> SylvesterPencil<S> {
    let d = seg.degree;
    let [f0, f1, f2] = &seg.f;
    // X = sum a_i t^i with a_i = f1_i - x f0_i
    let a: Vec<BivariatePoly<S>> = (0..=d)
        .map(|i| BivariatePoly::linear(-f0.coeff(i), S::zero(), f1.coeff(i)))
        .collect();
    let b: Vec<BivariatePoly<S>> = (0..=d)
        .map(|i| BivariatePoly::linear(S::zero(), -f0.coeff(i), f2.coeff(i)))
        .collect();
    let n = 2 * d;
    let mut m = PolyMatrix::zeros(n);
    for c in 0..d {
        for i in 0..=d {
            m.set(c + i, c, a[i].clone());
            m.set(c + i, d + c, b[i].clone());
        }
    }
    SylvesterPencil {
        segment: seg.clone(),
        matrix: m,
    }
}
