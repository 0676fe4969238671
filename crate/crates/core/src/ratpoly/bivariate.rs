use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::Scalar;
use super::univariate::UnivariatePoly;

/// Sparse polynomial in `(x, y)`, keyed by exponent pair `(e_x, e_y)`.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct BivariatePoly<S> {
    terms: BTreeMap<(u32, u32), S>,
}

impl<S: Scalar> Default for BivariatePoly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> BivariatePoly<S> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: S) -> Self {
        Self::from_terms([((0, 0), c)])
    }

    pub fn x() -> Self {
        Self::from_terms([((1, 0), S::one())])
    }

    pub fn y() -> Self {
        Self::from_terms([((0, 1), S::one())])
    }

    /// `a*x + b*y + c`
    pub fn linear(a: S, b: S, c: S) -> Self {
        Self::from_terms([((1, 0), a), ((0, 1), b), ((0, 0), c)])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), S)>) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: (u32, u32), c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&e) {
            Some(old) => {
                let v = old + c;
                if !v.is_zero() {
                    self.terms.insert(e, v);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, ex: u32, ey: u32) -> S {
        self.terms.get(&(ex, ey)).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|(a, b)| a + b).max()
    }

    pub fn degree_x(&self) -> Option<u32> {
        self.terms.keys().map(|(a, _)| *a).max()
    }

    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|(_, b)| *b).max()
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_terms(self.terms.iter().map(|(e, v)| (*e, v.clone() * c.clone())))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(S::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &S, y: &S) -> S {
        self.eval_with_scale(x, y).0
    }

    /// Value together with the sum of absolute term magnitudes, which is
    /// the natural scale against which float cancellation is judged.
    pub fn eval_with_scale(&self, x: &S, y: &S) -> (S, f64) {
        let (dx, dy) = (self.degree_x().unwrap_or(0), self.degree_y().unwrap_or(0));
        let xp = powers(x, dx);
        let yp = powers(y, dy);
        let mut value = S::zero();
        let mut scale = 0.0;
        for ((ex, ey), c) in &self.terms {
            let term = c.clone() * xp[*ex as usize].clone() * yp[*ey as usize].clone();
            if S::BACKEND == super::Backend::Float {
                scale += term.to_f64().abs();
            }
            value = value + term;
        }
        (value, scale)
    }

    /// Restricts the polynomial to a rational curve `(f1/f0, f2/f0)`,
    /// clearing denominators: returns `sum c_ij f1^i f2^j f0^(deg-i-j)`.
    /// `deg` must be at least the total degree.
    pub fn restrict_to_curve(
        &self,
        f0: &UnivariatePoly<S>,
        f1: &UnivariatePoly<S>,
        f2: &UnivariatePoly<S>,
        deg: u32,
    ) -> UnivariatePoly<S> {
        assert!(self.total_degree().unwrap_or(0) <= deg);
        let p0 = poly_powers(f0, deg);
        let p1 = poly_powers(f1, deg);
        let p2 = poly_powers(f2, deg);
        let mut out = UnivariatePoly::zero();
        for ((ex, ey), c) in &self.terms {
            let (ex, ey) = (*ex as usize, *ey as usize);
            let term = &(&p1[ex] * &p2[ey]) * &p0[deg as usize - ex - ey];
            out = &out + &term.scale(c);
        }
        out
    }

    pub fn cast<T: Scalar>(&self) -> BivariatePoly<T> {
        BivariatePoly::from_terms(self.terms.iter().map(|(e, c)| (*e, c.cast())))
    }
}

fn powers<S: Scalar>(v: &S, n: u32) -> Vec<S> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(S::one());
    for i in 0..n as usize {
        out.push(out[i].clone() * v.clone());
    }
    out
}

fn poly_powers<S: Scalar>(p: &UnivariatePoly<S>, n: u32) -> Vec<UnivariatePoly<S>> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(UnivariatePoly::constant(S::one()));
    for i in 0..n as usize {
        let next = &out[i] * p;
        out.push(next);
    }
    out
}

impl<S: Scalar> Add for &BivariatePoly<S> {
    type Output = BivariatePoly<S>;

    fn add(self, rhs: Self) -> BivariatePoly<S> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for &BivariatePoly<S> {
    type Output = BivariatePoly<S>;

    fn sub(self, rhs: Self) -> BivariatePoly<S> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<S: Scalar> Mul for &BivariatePoly<S> {
    type Output = BivariatePoly<S>;

    fn mul(self, rhs: Self) -> BivariatePoly<S> {
        let mut out = BivariatePoly::zero();
        for ((ax, ay), a) in &self.terms {
            for ((bx, by), b) in &rhs.terms {
                out.add_term((ax + bx, ay + by), a.clone() * b.clone());
            }
        }
        out
    }
}

impl<S: Scalar> Neg for BivariatePoly<S> {
    type Output = BivariatePoly<S>;

    fn neg(self) -> BivariatePoly<S> {
        BivariatePoly::from_terms(self.terms.into_iter().map(|(e, c)| (e, -c)))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr for BivariatePoly<S> {
            type Output = BivariatePoly<S>;
            fn $m(self, rhs: Self) -> BivariatePoly<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn eval_basics() {
        let xy = &BivariatePoly::<Rational>::x() * &BivariatePoly::y();
        assert_eq!(xy.eval(&q(2, 1), &q(3, 1)), q(6, 1));
        let p = &xy + &BivariatePoly::constant(q(-5, 2));
        assert_eq!(p.eval(&q(0, 1), &q(0, 1)), q(-5, 2));
    }

    #[test]
    fn inverse_denominator_at_first_physical_knot() {
        let p = BivariatePoly::linear(q(28, 1), q(31, 1), q(-57, 1));
        assert_eq!(p.eval(&q(7, 15), &q(3, 5)), q(-76, 3));
    }

    #[test]
    fn no_zero_terms_stored() {
        let p = BivariatePoly::linear(q(1, 1), q(0, 1), q(2, 1));
        assert_eq!(p.len(), 2);
        let z = &p - &p;
        assert!(z.is_zero());
        assert_eq!(z.total_degree(), None);
        let sq = p.pow(2);
        assert_eq!(sq.total_degree(), Some(2));
    }

    #[test]
    fn restriction_to_a_line() {
        // x + y on the curve (t, 1 - t) is identically 1.
        let f0 = UnivariatePoly::constant(q(1, 1));
        let f1 = UnivariatePoly::identity();
        let f2 = UnivariatePoly::new(vec![q(1, 1), q(-1, 1)]);
        let p = &BivariatePoly::x() + &BivariatePoly::y();
        let r = p.restrict_to_curve(&f0, &f1, &f2, 1);
        assert_eq!(r, UnivariatePoly::constant(q(1, 1)));
    }
}
