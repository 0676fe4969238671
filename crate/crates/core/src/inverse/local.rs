use crate::bezier::{quadratic_weighted_matrix, segment_homogeneous, BezierSegment};
use crate::bspline::NurbsCurve;
use crate::error::{Error, Result};
use crate::ratpoly::{scalar_det, Backend, BivariatePoly, Scalar, UnivariatePoly};

use super::sylvester::SylvesterPencil;

/// Where a rational map came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseSource {
    /// `t = C[row + 1][column] / C[row][column]`, signed cofactors of the
    /// Sylvester matrix (0-based indices).
    Minors { row: usize, column: usize },
    /// The quadratic determinant formula; `form` is 1 or 2.
    QuadraticClosedForm { form: u8 },
}

/// `numerator / denominator` in `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap<S> {
    pub numerator: BivariatePoly<S>,
    pub denominator: BivariatePoly<S>,
    pub source: InverseSource,
}

/// Relative size below which a float denominator is treated as unreliable.
const FLOAT_PIVOT: f64 = 1e-6;

impl<S: Scalar> RationalMap<S> {
    /// Value with the denominator's size relative to its term mass.
    pub(crate) fn eval_weighted(&self, x: &S, y: &S) -> Option<(S, f64)> {
        let (den, mass) = self.denominator.eval_with_scale(x, y);
        if den.is_zero() {
            return None;
        }
        let rel = match S::BACKEND {
            Backend::Exact => 1.0,
            Backend::Float => den.to_f64().abs() / mass.max(f64::MIN_POSITIVE),
        };
        Some((self.numerator.eval(x, y) / den, rel))
    }

    pub fn eval(&self, x: &S, y: &S) -> Option<S> {
        self.eval_weighted(x, y).map(|(v, _)| v)
    }

    /// Substitutes the segment parametrization, clearing `f0`.
    pub fn restricted(&self, seg: &BezierSegment<S>) -> (UnivariatePoly<S>, UnivariatePoly<S>) {
        let deg = self
            .numerator
            .total_degree()
            .max(self.denominator.total_degree())
            .unwrap_or(0);
        let [f0, f1, f2] = &seg.f;
        (
            self.numerator.restrict_to_curve(f0, f1, f2, deg),
            self.denominator.restrict_to_curve(f0, f1, f2, deg),
        )
    }

    pub fn cast<T: Scalar>(&self) -> RationalMap<T> {
        RationalMap {
            numerator: self.numerator.cast(),
            denominator: self.denominator.cast(),
            source: self.source,
        }
    }

    /// Float copy with both polynomials divided by the largest denominator
    /// coefficient, keeping magnitudes near one.
    fn to_normalized_float(&self) -> RationalMap<f64> {
        let big = self
            .denominator
            .terms()
            .map(|(_, c)| c.abs().to_rational())
            .max()
            .unwrap_or_else(|| S::one().to_rational());
        let inv = S::from_rational(&big.recip());
        RationalMap {
            numerator: self.numerator.scale(&inv).cast(),
            denominator: self.denominator.scale(&inv).cast(),
            source: self.source,
        }
    }
}

/// Inverse `psi_k^{-1}` of one segment in its local chart `t in [0, 1]`.
///
/// `primary` is certified: its restricted denominator does not vanish
/// identically and the symbolic round trip holds. `alternates` are used at
/// points where the primary denominator vanishes (common extraneous factors
/// of the minors can have isolated zeros on the segment).
#[derive(Clone, Debug, PartialEq)]
pub struct LocalInverse<S> {
    pub interval: usize,
    pub primary: RationalMap<S>,
    pub alternates: Vec<RationalMap<S>>,
}

impl<S: Scalar> LocalInverse<S> {
    pub fn numerator(&self) -> &BivariatePoly<S> {
        &self.primary.numerator
    }

    pub fn denominator(&self) -> &BivariatePoly<S> {
        &self.primary.denominator
    }

    pub fn source(&self) -> InverseSource {
        self.primary.source
    }

    pub fn branches(&self) -> impl Iterator<Item = &RationalMap<S>> {
        std::iter::once(&self.primary).chain(&self.alternates)
    }

    /// Local parameter of `(x, y)`, or `None` when every branch has a zero
    /// denominator there.
    pub fn eval(&self, x: &S, y: &S) -> Option<S> {
        self.eval_weighted(x, y).map(|(v, _)| v)
    }

    /// Value from the best branch, with that branch's relative denominator
    /// size (always 1 for exact values). Floats switch to the alternates
    /// when the primary denominator is small relative to its terms.
    pub(crate) fn eval_weighted(&self, x: &S, y: &S) -> Option<(S, f64)> {
        let first = self.primary.eval_weighted(x, y);
        if let Some((_, rel)) = &first {
            if S::BACKEND == Backend::Exact || *rel >= FLOAT_PIVOT || self.alternates.is_empty() {
                return first;
            }
        }
        first
            .into_iter()
            .chain(self.alternates.iter().filter_map(|m| m.eval_weighted(x, y)))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    }

    pub fn cast<T: Scalar>(&self) -> LocalInverse<T> {
        LocalInverse {
            interval: self.interval,
            primary: self.primary.cast(),
            alternates: self.alternates.iter().map(|m| m.cast()).collect(),
        }
    }

    pub fn to_float(&self) -> LocalInverse<f64> {
        LocalInverse {
            interval: self.interval,
            primary: self.primary.to_normalized_float(),
            alternates: self.alternates.iter().map(|m| m.to_normalized_float()).collect(),
        }
    }
}

/// Outcome of certifying a candidate map on a segment.
#[derive(Clone, Debug)]
pub(crate) struct Certified<S> {
    pub map: RationalMap<S>,
    /// Whether the restricted denominator may vanish somewhere in `[0, 1]`.
    pub may_vanish: bool,
}

/// Checks that the restricted denominator is not identically zero and that
/// `N(psi(t)) = t D(psi(t))` holds as a polynomial identity.
pub(crate) fn certify<S: Scalar>(map: RationalMap<S>, seg: &BezierSegment<S>) -> Option<Certified<S>> {
    let (n, d) = map.restricted(seg);
    if d.coeffs().iter().all(|c| c.is_negligible(1.0)) {
        return None;
    }
    let t = UnivariatePoly::identity();
    let residual = &n - &(&t * &d);
    let scale = d.coeffs().iter().map(|c| c.to_f64().abs()).fold(0.0, f64::max);
    if !residual.coeffs().iter().all(|c| c.is_negligible(scale)) {
        return None;
    }
    let may_vanish = may_vanish_on_unit(&d);
    Some(Certified { map, may_vanish })
}

/// Conservative test for a zero of `p` in `[0, 1]`: only strict sign
/// agreement of the Bernstein coefficients rules zeros out.
pub(crate) fn may_vanish_on_unit<S: Scalar>(p: &UnivariatePoly<S>) -> bool {
    let Some(n) = p.degree() else {
        return true;
    };
    let b = monomial_to_bernstein(p, n);
    !(b.iter().all(|c| c.is_positive()) || b.iter().all(|c| c.is_negative()))
}

/// Bernstein coefficients of degree `n` on `[0, 1]`:
/// `b_j = sum_{i<=j} C(j,i)/C(n,i) a_i`.
pub fn monomial_to_bernstein<S: Scalar>(p: &UnivariatePoly<S>, n: usize) -> Vec<S> {
    let binom = |a: usize, b: usize| -> S {
        let mut num = S::one();
        for i in 0..b {
            num = num * S::from_int((a - i) as i64) / S::from_int(i as i64 + 1);
        }
        num
    };
    (0..=n)
        .map(|j| {
            (0..=j).fold(S::zero(), |acc, i| {
                acc + binom(j, i) / binom(n, i) * p.coeff(i)
            })
        })
        .collect()
}

fn minor_pair<S: Scalar>(pencil: &SylvesterPencil<S>, row: usize, column: usize) -> RationalMap<S> {
    RationalMap {
        numerator: pencil.matrix.cofactor(row + 1, column),
        denominator: pencil.matrix.cofactor(row, column),
        source: InverseSource::Minors { row, column },
    }
}

/// Local inverse from consecutive minors with the last column deleted,
/// starting at the 1-based row pair `i` and moving to later pairs while the
/// pair is degenerate on the segment.
pub fn local_inverse_from_minors<S: Scalar>(
    pencil: &SylvesterPencil<S>,
    i: usize,
) -> Result<LocalInverse<S>> {
    let n = 2 * pencil.degree();
    if i == 0 || i >= n {
        return Err(Error::IndexOutOfRange { index: i, limit: n });
    }
    let column = n - 1;
    for row in i - 1..n - 1 {
        if let Some(c) = certify(minor_pair(pencil, row, column), &pencil.segment) {
            return Ok(LocalInverse {
                interval: pencil.interval(),
                primary: c.map,
                alternates: Vec::new(),
            });
        }
    }
    Err(Error::NonGeneralSegment {
        interval: pencil.interval(),
        reason: "every minor pair in the last column vanishes on the segment".into(),
    })
}

/// Maximum number of fallback branches kept per segment.
const MAX_ALTERNATES: usize = 2;

/// Local inverse chosen over the deleted columns, last column first.
///
/// A certified pair whose restricted denominator provably has no zero in
/// `[0, 1]` becomes the sole branch. Otherwise the first certified pairs
/// are kept as primary plus alternates: zeros specific to one column are
/// covered by another. Zeros shared by every column (points where the
/// Sylvester rank drops by two) are handled pointwise by the caller.
pub fn build_local_inverse<S: Scalar>(pencil: &SylvesterPencil<S>) -> Result<LocalInverse<S>> {
    let n = 2 * pencil.degree();
    let mut found: Vec<RationalMap<S>> = Vec::new();
    for column in (0..n).rev() {
        // other rows only multiply the common factor by powers of t, so the
        // first certified row pair of a column is the best one
        let certified =
            (0..n - 1).find_map(|row| certify(minor_pair(pencil, row, column), &pencil.segment));
        let Some(c) = certified else { continue };
        if !c.may_vanish && found.is_empty() {
            return Ok(LocalInverse {
                interval: pencil.interval(),
                primary: c.map,
                alternates: Vec::new(),
            });
        }
        found.push(c.map);
        if found.len() > MAX_ALTERNATES {
            break;
        }
    }
    if found.is_empty() {
        return Err(Error::NonGeneralSegment {
            interval: pencil.interval(),
            reason: "no minor pair of the Sylvester matrix is a valid inverse".into(),
        });
    }
    let primary = found.remove(0);
    Ok(LocalInverse {
        interval: pencil.interval(),
        primary,
        alternates: found,
    })
}

/// Lifted point `(1, x, y)`.
fn lifted<S: Scalar>(p: &[S; 2]) -> [BivariatePoly<S>; 3] {
    [
        BivariatePoly::constant(S::one()),
        BivariatePoly::constant(p[0].clone()),
        BivariatePoly::constant(p[1].clone()),
    ]
}

/// Determinant of the 3x3 matrix with the given columns.
fn det3<S: Scalar>(c: [&[BivariatePoly<S>; 3]; 3]) -> BivariatePoly<S> {
    let m = |r: usize, k: usize| &c[k][r];
    let minor = |r0: usize, r1: usize, k0: usize, k1: usize| {
        &(m(r0, k0) * m(r1, k1)) - &(m(r0, k1) * m(r1, k0))
    };
    let e0 = m(0, 0) * &minor(1, 2, 1, 2);
    let e1 = m(0, 1) * &minor(1, 2, 0, 2);
    let e2 = m(0, 2) * &minor(1, 2, 0, 1);
    &(&e0 - &e1) + &e2
}

/// Determinant of the active control triple `P_{k-2}, P_{k-1}, P_k` in
/// lifted form; zero exactly when the three points are collinear.
pub fn active_triple_det<S: Scalar>(curve: &NurbsCurve<S>, k: usize) -> S {
    let p = curve.control_points();
    let rows: Vec<Vec<S>> = (0..3)
        .map(|r| {
            (k - 2..=k)
                .map(|i| match r {
                    0 => S::one(),
                    _ => p[i][r - 1].clone(),
                })
                .collect()
        })
        .collect();
    scalar_det(rows)
}

/// Quadratic inverse from Cramer's rule on the weighted extraction matrix.
///
/// With `rho = (rho_0, -rho_1, rho_2)` built from the lifted active triple
/// and `T = diag(w) S^T` (the transpose of the extraction matrix with column
/// `i` scaled by `w_{k-2+i}`), the Cramer determinants `c_1, c_2, c_3` of
/// `T c = rho` are proportional to `((1-t)^2, 2t(1-t), t^2)`. Hence
/// `t = (c_2/2) / (c_2/2 + c_1) = c_3 / (c_3 + c_2/2)`; the first form is
/// the primary branch and the second its fallback near `t = 1`.
pub fn quadratic_closed_form<S: Scalar>(curve: &NurbsCurve<S>, k: usize) -> Result<LocalInverse<S>> {
    // validates degree and the interval
    let row_scaled = quadratic_weighted_matrix(curve, k)?;
    if active_triple_det(curve, k).is_zero() {
        return Err(Error::CollinearTriple { first: k - 2, last: k });
    }
    let w = curve.weights();
    // row-scaled matrix back to the plain extraction matrix
    let s: Vec<Vec<S>> = row_scaled
        .rows
        .iter()
        .enumerate()
        .map(|(j, row)| row.iter().map(|v| v.clone() / w[k - 2 + j].clone()).collect())
        .collect();
    // T[i][j] = w_{k-2+i} S[j][i]
    let t: Vec<Vec<S>> = (0..3)
        .map(|i| (0..3).map(|j| w[k - 2 + i].clone() * s[j][i].clone()).collect())
        .collect();
    let p = curve.control_points();
    let pb: Vec<[BivariatePoly<S>; 3]> = (k - 2..=k).map(|i| lifted(&p[i])).collect();
    let x = [BivariatePoly::constant(S::one()), BivariatePoly::x(), BivariatePoly::y()];
    let rho = [
        det3([&pb[1], &pb[2], &x]),
        -det3([&pb[0], &pb[2], &x]),
        det3([&pb[0], &pb[1], &x]),
    ];
    // c_i = det(T with column i replaced by rho), expanded along that column
    let cramer = |col: usize| -> BivariatePoly<S> {
        let mut acc = BivariatePoly::zero();
        for r in 0..3 {
            let minor: Vec<Vec<S>> = (0..3)
                .filter(|&rr| rr != r)
                .map(|rr| (0..3).filter(|&cc| cc != col).map(|cc| t[rr][cc].clone()).collect())
                .collect();
            let mut cof = scalar_det(minor);
            if (r + col) % 2 == 1 {
                cof = -cof;
            }
            acc = &acc + &rho[r].scale(&cof);
        }
        acc
    };
    let (c1, c2, c3) = (cramer(0), cramer(1), cramer(2));
    let half_c2 = c2.scale(&S::from_ratio(1, 2));
    let first = RationalMap {
        numerator: half_c2.clone(),
        denominator: &half_c2 + &c1,
        source: InverseSource::QuadraticClosedForm { form: 1 },
    };
    let second = RationalMap {
        numerator: c3.clone(),
        denominator: &c3 + &half_c2,
        source: InverseSource::QuadraticClosedForm { form: 2 },
    };
    let seg = segment_homogeneous(curve, k)?;
    for m in [&first, &second] {
        if certify(m.clone(), &seg).is_none() {
            return Err(Error::NonGeneralSegment {
                interval: k,
                reason: "quadratic closed form fails the round trip".into(),
            });
        }
    }
    Ok(LocalInverse {
        interval: k,
        primary: first,
        alternates: vec![second],
    })
}
