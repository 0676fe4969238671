use crate::error::{Error, Result};
use crate::ratpoly::Scalar;

/// Nondecreasing knot sequence `u_0 <= ... <= u_m` with `u_m > u_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotVector<S> {
    knots: Vec<S>,
}

/// A knot interval `[lo, hi)` of nonzero length; `index` is `k` in `I_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotInterval<S> {
    pub index: usize,
    pub lo: S,
    pub hi: S,
}

impl<S: Scalar> KnotVector<S> {
    pub fn new(knots: Vec<S>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidKnots("at least two knots required".into()));
        }
        if let Some(i) = knots.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidKnots(format!(
                "knots decrease at index {}",
                i + 1
            )));
        }
        if knots.first() >= knots.last() {
            return Err(Error::InvalidKnots("all knots are equal".into()));
        }
        Ok(Self { knots })
    }

    pub fn as_slice(&self) -> &[S] {
        &self.knots
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn first(&self) -> &S {
        &self.knots[0]
    }

    pub fn last(&self) -> &S {
        &self.knots[self.knots.len() - 1]
    }

    pub fn multiplicity(&self, value: &S) -> usize {
        self.knots.iter().filter(|k| *k == value).count()
    }

    /// True when the first and last knot each appear exactly `degree + 1`
    /// times.
    pub fn is_clamped(&self, degree: usize) -> bool {
        self.multiplicity(self.first()) == degree + 1 && self.multiplicity(self.last()) == degree + 1
    }

    /// Distinct knots with their multiplicities.
    pub fn reduced(&self) -> (Vec<S>, Vec<usize>) {
        let mut values: Vec<S> = Vec::new();
        let mut mults: Vec<usize> = Vec::new();
        for k in &self.knots {
            if values.last() == Some(k) {
                *mults.last_mut().unwrap() += 1;
            } else {
                values.push(k.clone());
                mults.push(1);
            }
        }
        (values, mults)
    }

    /// Intervals `[u_k, u_{k+1})` of nonzero length, in increasing order.
    pub fn active_intervals(&self) -> Vec<KnotInterval<S>> {
        self.knots
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0])
            .map(|(index, w)| KnotInterval {
                index,
                lo: w[0].clone(),
                hi: w[1].clone(),
            })
            .collect()
    }

    /// Index of the last nonempty interval; it owns the right endpoint.
    fn last_active(&self) -> usize {
        (0..self.knots.len() - 1)
            .rev()
            .find(|&k| self.knots[k + 1] > self.knots[k])
            .expect("validated knot vector has an active interval")
    }

    pub fn check_domain(&self, u: &S) -> Result<()> {
        if u < self.first() || u > self.last() {
            return Err(Error::OutOfDomain {
                value: u.to_string(),
                lo: self.first().to_string(),
                hi: self.last().to_string(),
            });
        }
        Ok(())
    }

    /// Index `k` of the active interval containing `u` under the half-open
    /// convention, with `u_m` owned by the last active interval.
    pub fn span(&self, u: &S) -> Result<usize> {
        self.check_domain(u)?;
        if u == self.last() {
            return Ok(self.last_active());
        }
        // largest k with u_k <= u < u_{k+1}
        let k = self.knots.partition_point(|v| v <= u) - 1;
        Ok(k)
    }

    /// Greville abscissae `xi_i = (u_{i+1} + ... + u_{i+p}) / p` for
    /// `i = 0..len-p-1`.
    pub fn greville(&self, p: usize) -> Result<Vec<S>> {
        if p == 0 || self.knots.len() < p + 2 {
            return Err(Error::Config(format!(
                "Greville points of degree {p} need at least {} knots, have {}",
                p + 2,
                self.knots.len()
            )));
        }
        let denom = S::from_int(p as i64);
        Ok((0..self.knots.len() - p - 1)
            .map(|i| {
                let sum = self.knots[i + 1..=i + p]
                    .iter()
                    .fold(S::zero(), |a, b| a + b.clone());
                sum / denom.clone()
            })
            .collect())
    }

    /// `N_{k,d}(u)` by the Cox-de Boor recursion with `0/0 = 0`.
    pub fn basis(&self, d: usize, k: usize, u: &S) -> Result<S> {
        let count = self.knots.len().saturating_sub(d + 1);
        if k >= count {
            return Err(Error::IndexOutOfRange { index: k, limit: count });
        }
        self.check_domain(u)?;
        let closing = if u == self.last() {
            Some(self.last_active())
        } else {
            None
        };
        Ok(self.cox_de_boor(d, k, u, closing))
    }

    /// Derivative `N'_{k,d}(u)` of the given order (0, 1 or 2).
    pub fn basis_derivative(&self, d: usize, k: usize, u: &S, order: usize) -> Result<S> {
        let count = self.knots.len().saturating_sub(d + 1);
        if k >= count {
            return Err(Error::IndexOutOfRange { index: k, limit: count });
        }
        self.check_domain(u)?;
        let closing = if u == self.last() {
            Some(self.last_active())
        } else {
            None
        };
        Ok(self.derivative_rec(d, k, u, order, closing))
    }

    fn cox_de_boor(&self, d: usize, k: usize, u: &S, closing: Option<usize>) -> S {
        let kn = &self.knots;
        if d == 0 {
            let inside = (kn[k] <= *u && *u < kn[k + 1]) || closing == Some(k);
            return if inside { S::one() } else { S::zero() };
        }
        let mut value = S::zero();
        let left = kn[k + d].clone() - kn[k].clone();
        if !left.is_zero() {
            let n = self.cox_de_boor(d - 1, k, u, closing);
            if !n.is_zero() {
                value = value + (u.clone() - kn[k].clone()) / left * n;
            }
        }
        let right = kn[k + d + 1].clone() - kn[k + 1].clone();
        if !right.is_zero() {
            let n = self.cox_de_boor(d - 1, k + 1, u, closing);
            if !n.is_zero() {
                value = value + (kn[k + d + 1].clone() - u.clone()) / right * n;
            }
        }
        value
    }

    fn derivative_rec(&self, d: usize, k: usize, u: &S, order: usize, closing: Option<usize>) -> S {
        if order == 0 {
            return self.cox_de_boor(d, k, u, closing);
        }
        if d == 0 {
            return S::zero();
        }
        let kn = &self.knots;
        let deg = S::from_int(d as i64);
        let mut value = S::zero();
        let left = kn[k + d].clone() - kn[k].clone();
        if !left.is_zero() {
            value = value + deg.clone() / left * self.derivative_rec(d - 1, k, u, order - 1, closing);
        }
        let right = kn[k + d + 1].clone() - kn[k + 1].clone();
        if !right.is_zero() {
            value = value - deg / right * self.derivative_rec(d - 1, k + 1, u, order - 1, closing);
        }
        value
    }

    pub fn cast<T: Scalar>(&self) -> KnotVector<T> {
        KnotVector {
            knots: self.knots.iter().map(|k| k.cast()).collect(),
        }
    }
}
