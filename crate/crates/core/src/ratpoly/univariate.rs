use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::Scalar;

/// Dense univariate polynomial; `coeffs[i]` multiplies `t^i`.
///
/// Canonical form has no trailing zero coefficient, so the zero polynomial
/// has no coefficients at all.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariatePoly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> UnivariatePoly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `t`.
    pub fn identity() -> Self {
        Self::new(vec![S::zero(), S::one()])
    }

    pub fn monomial(c: S, power: usize) -> Self {
        let mut coeffs = vec![S::zero(); power + 1];
        coeffs[power] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `t^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, t: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * S::from_int(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(S::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd].clone() / lead.clone();
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j].clone() - c.clone() * dc.clone();
            }
            rem[i + dd] = S::zero();
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    /// Meaningful for the exact backend only.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.leading().cloned() {
            Some(lead) => a.scale(&(S::one() / lead)),
            None => a,
        }
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`,
    /// counted with a Sturm sequence. Reliable for the exact backend.
    pub fn count_roots(&self, a: &S, b: &S) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(-r);
        }
        let changes = |x: &S| {
            let mut count = 0usize;
            let mut prev: Option<bool> = None;
            for p in &seq {
                let v = p.eval(x);
                if v.is_zero() {
                    continue;
                }
                let pos = v.is_positive();
                if prev.is_some_and(|q| q != pos) {
                    count += 1;
                }
                prev = Some(pos);
            }
            count
        };
        changes(a).saturating_sub(changes(b))
    }

    pub fn cast<T: Scalar>(&self) -> UnivariatePoly<T> {
        UnivariatePoly::new(self.coeffs.iter().map(|c| c.cast()).collect())
    }
}

impl<S: Scalar> Add for &UnivariatePoly<S> {
    type Output = UnivariatePoly<S>;

    fn add(self, rhs: Self) -> UnivariatePoly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivariatePoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Sub for &UnivariatePoly<S> {
    type Output = UnivariatePoly<S>;

    fn sub(self, rhs: Self) -> UnivariatePoly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UnivariatePoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<S: Scalar> Mul for &UnivariatePoly<S> {
    type Output = UnivariatePoly<S>;

    fn mul(self, rhs: Self) -> UnivariatePoly<S> {
        if self.is_zero() || rhs.is_zero() {
            return UnivariatePoly::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UnivariatePoly::new(out)
    }
}

impl<S: Scalar> Neg for UnivariatePoly<S> {
    type Output = UnivariatePoly<S>;

    fn neg(self) -> UnivariatePoly<S> {
        UnivariatePoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr for UnivariatePoly<S> {
            type Output = UnivariatePoly<S>;
            fn $m(self, rhs: Self) -> UnivariatePoly<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
