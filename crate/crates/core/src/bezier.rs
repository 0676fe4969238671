//! Per-interval rational Bézier form of a NURBS curve.
//!
//! The change-of-basis matrix `S_{k,d}` is obtained by Boehm knot insertion
//! at the ends of interval `k`, carrying identity coefficient vectors
//! through the insertion.

use crate::bspline::{KnotVector, NurbsCurve};
use crate::error::{Error, Result};
use crate::ratpoly::{Scalar, UnivariatePoly};

/// `(d+1) x (d+1)` matrix with `(F_0 .. F_d) = (B_0 .. B_d) * S`; rows are
/// Bernstein indices, columns index the active B-splines `N_{k-d+i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionMatrix<S> {
    pub interval: usize,
    pub rows: Vec<Vec<S>>,
}

impl<S: Scalar> ExtractionMatrix<S> {
    pub fn degree(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.rows[row][col]
    }
}

/// Homogeneous polynomial triple `(f0, f1, f2)` of one knot interval in the
/// local chart `t = (u - u_lo) / (u_hi - u_lo)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BezierSegment<S> {
    pub interval: usize,
    pub u_lo: S,
    pub u_hi: S,
    pub degree: usize,
    pub f: [UnivariatePoly<S>; 3],
}

impl<S: Scalar> BezierSegment<S> {
    /// `(f1/f0, f2/f0)(t)`.
    pub fn eval(&self, t: &S) -> [S; 2] {
        let w = self.f[0].eval(t);
        [self.f[1].eval(t) / w.clone(), self.f[2].eval(t) / w]
    }

    pub fn to_global(&self, t: &S) -> S {
        self.u_lo.clone() + t.clone() * (self.u_hi.clone() - self.u_lo.clone())
    }

    pub fn to_local(&self, u: &S) -> S {
        (u.clone() - self.u_lo.clone()) / (self.u_hi.clone() - self.u_lo.clone())
    }

    pub fn cast<T: Scalar>(&self) -> BezierSegment<T> {
        BezierSegment {
            interval: self.interval,
            u_lo: self.u_lo.cast(),
            u_hi: self.u_hi.cast(),
            degree: self.degree,
            f: [self.f[0].cast(), self.f[1].cast(), self.f[2].cast()],
        }
    }
}

fn check_active<S: Scalar>(knots: &KnotVector<S>, d: usize, k: usize) -> Result<()> {
    let u = knots.as_slice();
    if k < d || k + d + 1 >= u.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            limit: u.len().saturating_sub(d + 1),
        });
    }
    if u[k + 1] <= u[k] {
        return Err(Error::InactiveInterval(k));
    }
    Ok(())
}

/// Inserts `value` once into `(knots, ctrl)` for degree `d`.
fn insert_knot<S: Scalar>(knots: &mut Vec<S>, ctrl: &mut Vec<Vec<S>>, d: usize, value: &S) {
    // span s with t_s <= value < t_{s+1}
    let s = knots.partition_point(|t| t <= value) - 1;
    let mut next = Vec::with_capacity(ctrl.len() + 1);
    for i in 0..=ctrl.len() {
        if i + d <= s {
            next.push(ctrl[i].clone());
        } else if i > s {
            next.push(ctrl[i - 1].clone());
        } else {
            let a = (value.clone() - knots[i].clone()) / (knots[i + d].clone() - knots[i].clone());
            let one_minus = S::one() - a.clone();
            next.push(
                ctrl[i - 1]
                    .iter()
                    .zip(&ctrl[i])
                    .map(|(p, q)| one_minus.clone() * p.clone() + a.clone() * q.clone())
                    .collect(),
            );
        }
    }
    knots.insert(s + 1, value.clone());
    *ctrl = next;
}

/// `S_{k,d}` for the active interval `k` by knot insertion.
pub fn extraction_matrix<S: Scalar>(
    knots: &KnotVector<S>,
    d: usize,
    k: usize,
) -> Result<ExtractionMatrix<S>> {
    check_active(knots, d, k)?;
    let u = knots.as_slice();
    let (lo, hi) = (u[k].clone(), u[k + 1].clone());
    let n = u.len() - d - 1;
    let mut window: Vec<S> = u.to_vec();
    let mut ctrl: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    while window.iter().filter(|t| **t == lo).count() < d {
        insert_knot(&mut window, &mut ctrl, d, &lo);
    }
    while window.iter().filter(|t| **t == hi).count() < d {
        insert_knot(&mut window, &mut ctrl, d, &hi);
    }
    // the Bézier points of [lo, hi) are the d+1 coefficients ending at the
    // last copy of lo in the refined vector
    let span = window.partition_point(|t| *t <= lo) - 1;
    let rows = ctrl[span - d..=span]
        .iter()
        .map(|c| c[k - d..=k].to_vec())
        .collect();
    Ok(ExtractionMatrix { interval: k, rows })
}

/// The quadratic matrix `S_{k,2}` with row `i` multiplied by `w_{k-2+i}`.
pub fn quadratic_weighted_matrix<S: Scalar>(
    curve: &NurbsCurve<S>,
    k: usize,
) -> Result<ExtractionMatrix<S>> {
    if curve.degree() != 2 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: curve.degree(),
        });
    }
    let mut m = extraction_matrix(curve.knots(), 2, k)?;
    for (i, row) in m.rows.iter_mut().enumerate() {
        let w = curve.weights()[k - 2 + i].clone();
        for v in row.iter_mut() {
            *v = v.clone() * w.clone();
        }
    }
    Ok(m)
}

/// Bernstein polynomial `B_{j,d}(t)` in monomial form.
pub fn bernstein<S: Scalar>(d: usize, j: usize) -> UnivariatePoly<S> {
    let one_minus = UnivariatePoly::new(vec![S::one(), -S::one()]);
    let binom = (0..j).fold(1i64, |acc, i| acc * (d - i) as i64 / (i as i64 + 1));
    let t_pow = UnivariatePoly::monomial(S::one(), j);
    (&t_pow * &one_minus.pow((d - j) as u32)).scale(&S::from_int(binom))
}

/// The homogeneous Bézier triple of the curve on active interval `k`.
pub fn segment_homogeneous<S: Scalar>(curve: &NurbsCurve<S>, k: usize) -> Result<BezierSegment<S>> {
    let d = curve.degree();
    let s = extraction_matrix(curve.knots(), d, k)?;
    let points = curve.control_points();
    let weights = curve.weights();
    let mut f = [
        UnivariatePoly::zero(),
        UnivariatePoly::zero(),
        UnivariatePoly::zero(),
    ];
    for j in 0..=d {
        let b = bernstein::<S>(d, j);
        let mut a = [S::zero(), S::zero(), S::zero()];
        for i in 0..=d {
            let idx = k - d + i;
            let c = s.get(j, i).clone() * weights[idx].clone();
            a[0] = a[0].clone() + c.clone();
            a[1] = a[1].clone() + c.clone() * points[idx][0].clone();
            a[2] = a[2].clone() + c * points[idx][1].clone();
        }
        for (fc, ac) in f.iter_mut().zip(a.iter()) {
            *fc = &*fc + &b.scale(ac);
        }
    }
    let u = curve.knots().as_slice();
    Ok(BezierSegment {
        interval: k,
        u_lo: u[k].clone(),
        u_hi: u[k + 1].clone(),
        degree: d,
        f,
    })
}

/// All segments of the curve, one per active interval.
pub fn segments<S: Scalar>(curve: &NurbsCurve<S>) -> Result<Vec<BezierSegment<S>>> {
    curve
        .knots()
        .active_intervals()
        .iter()
        .map(|iv| segment_homogeneous(curve, iv.index))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ratpoly::Rational;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn kv(v: &[Rational]) -> KnotVector<Rational> {
        KnotVector::new(v.to_vec()).unwrap()
    }

    /// Bernstein coefficients by exact interpolation of `N_{i,d}` at
    /// `t = j/d` and inversion of the Bernstein collocation matrix.
    fn interpolation_oracle(u: &KnotVector<Rational>, d: usize, k: usize) -> Vec<Vec<Rational>> {
        let (lo, hi) = (u.as_slice()[k].clone(), u.as_slice()[k + 1].clone());
        let ts: Vec<Rational> = (0..=d).map(|j| q(j as i64, d as i64)).collect();
        // collocation A[r][j] = B_j(t_r)
        let a: Vec<Vec<Rational>> = ts
            .iter()
            .map(|t| (0..=d).map(|j| bernstein::<Rational>(d, j).eval(t)).collect())
            .collect();
        let mut out = vec![vec![q(0, 1); d + 1]; d + 1];
        for i in 0..=d {
            // interior multiplicities never exceed d here, so N_i is
            // continuous at the right end of the interval
            let rhs: Vec<Rational> = ts
                .iter()
                .map(|t| {
                    let uu = lo.clone() + t.clone() * (hi.clone() - lo.clone());
                    u.basis(d, k - d + i, &uu).unwrap()
                })
                .collect();
            let sol = solve(a.clone(), rhs);
            for j in 0..=d {
                out[j][i] = sol[j].clone();
            }
        }
        out
    }

    fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Vec<Rational> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero()).unwrap();
            a.swap(c, p);
            b.swap(c, p);
            for r in 0..n {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone() / a[c][c].clone();
                    for cc in 0..n {
                        let v = a[c][cc].clone() * f.clone();
                        a[r][cc] = a[r][cc].clone() - v;
                    }
                    let v = b[c].clone() * f;
                    b[r] = b[r].clone() - v;
                }
            }
        }
        (0..n).map(|i| b[i].clone() / a[i][i].clone()).collect()
    }

    fn quad_knots() -> KnotVector<Rational> {
        kv(&[q(0, 1), q(0, 1), q(0, 1), q(1, 2), q(1, 1), q(1, 1), q(1, 1)])
    }

    /// The `a_k`, `b_k` quadratic matrix with unit weights.
    fn ab_matrix(u: &[Rational], k: usize) -> Vec<Vec<Rational>> {
        let a = (u[k].clone() - u[k - 1].clone()) / (u[k + 1].clone() - u[k - 1].clone());
        let b = (u[k + 1].clone() - u[k].clone()) / (u[k + 2].clone() - u[k].clone());
        vec![
            vec![q(1, 1) - a.clone(), a, q(0, 1)],
            vec![q(0, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(1, 1) - b.clone(), b],
        ]
    }

    #[test]
    fn quadratic_matrices_match_ab_formulas() {
        let u = quad_knots();
        for k in [2, 3] {
            let s = extraction_matrix(&u, 2, k).unwrap();
            assert_eq!(s.rows, ab_matrix(u.as_slice(), k), "k = {k}");
        }
        let s3 = ab_matrix(u.as_slice(), 3);
        assert_eq!((s3[0][1].clone(), s3[2][2].clone()), (q(1, 2), q(1, 1)));
    }

    #[test]
    fn single_span_is_identity() {
        let u = kv(&[q(0, 1), q(0, 1), q(0, 1), q(1, 1), q(1, 1), q(1, 1)]);
        let s = extraction_matrix(&u, 2, 2).unwrap();
        for (j, row) in s.rows.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                assert_eq!(*v, if i == j { q(1, 1) } else { q(0, 1) });
            }
        }
    }

    #[test]
    fn inactive_interval_rejected() {
        let u = kv(&[
            q(0, 1), q(0, 1), q(0, 1), q(1, 2), q(1, 2), q(1, 1), q(1, 1), q(1, 1),
        ]);
        assert_eq!(extraction_matrix(&u, 2, 3), Err(Error::InactiveInterval(3)));
        assert!(extraction_matrix(&quad_knots(), 2, 1).is_err());
    }

    #[test]
    fn extraction_matches_interpolation_for_all_fixtures() {
        for curve in fixtures::all_exact() {
            let d = curve.degree();
            for iv in curve.knots().active_intervals() {
                let s = extraction_matrix(curve.knots(), d, iv.index).unwrap();
                assert_eq!(s.rows, interpolation_oracle(curve.knots(), d, iv.index));
                // all-ones column vector reproduces the Bernstein form of 1
                for row in &s.rows {
                    assert_eq!(row.iter().cloned().sum::<Rational>(), q(1, 1));
                }
            }
        }
    }

    #[test]
    fn weighted_matrix_scales_rows() {
        let c = fixtures::quadratic();
        let m = quadratic_weighted_matrix(&c, 2).unwrap();
        let base = ab_matrix(c.knots().as_slice(), 2);
        for (i, w) in [q(1, 1), q(3, 1), q(3, 2)].iter().enumerate() {
            for j in 0..3 {
                assert_eq!(m.rows[i][j], base[i][j].clone() * w.clone());
            }
        }
        let m3 = quadratic_weighted_matrix(&c, 3).unwrap();
        let base3 = ab_matrix(c.knots().as_slice(), 3);
        for (i, w) in [q(3, 1), q(3, 2), q(1, 1)].iter().enumerate() {
            for j in 0..3 {
                assert_eq!(m3.rows[i][j], base3[i][j].clone() * w.clone());
            }
        }
        assert!(quadratic_weighted_matrix(&fixtures::cubic(), 3).is_err());
    }

    #[test]
    fn unit_weights_coincide() {
        let c = fixtures::quadratic();
        let unit = NurbsCurve::new(
            2,
            c.knots().clone(),
            c.control_points().to_vec(),
            vec![q(1, 1); 4],
        )
        .unwrap();
        for k in [2, 3] {
            assert_eq!(
                quadratic_weighted_matrix(&unit, k).unwrap(),
                extraction_matrix(unit.knots(), 2, k).unwrap()
            );
        }
    }

    fn quad_explicit(u: &Rational) -> [Rational; 2] {
        if *u < q(1, 2) {
            let d = q(55, 1) * u * u - q(40, 1) * u - q(5, 1);
            [
                (q(9, 1) * u * u - q(15, 1) * u) / d.clone(),
                (q(93, 1) * u * u - q(60, 1) * u) / d,
            ]
        } else {
            let d = q(5, 1) * (u - q(2, 1)) * (u - q(2, 1));
            [
                (q(-13, 1) * u * u + q(19, 1) * u - q(1, 1)) / d.clone(),
                (q(47, 1) * u * u - q(80, 1) * u + q(35, 1)) / d,
            ]
        }
    }

    #[test]
    fn quadratic_segments_match_explicit_branches() {
        let c = fixtures::quadratic();
        let s2 = segment_homogeneous(&c, 2).unwrap();
        for u in [q(1, 8), q(1, 4), q(3, 8)] {
            assert_eq!(s2.eval(&(q(2, 1) * u.clone())), quad_explicit(&u));
        }
        let s3 = segment_homogeneous(&c, 3).unwrap();
        for u in [q(3, 5), q(3, 4), q(9, 10)] {
            assert_eq!(s3.eval(&(q(2, 1) * u.clone() - q(1, 1))), quad_explicit(&u));
        }
        assert_eq!(s2.f[0].eval(&q(0, 1)), q(1, 1));
    }

    #[test]
    fn segments_agree_with_curve_evaluation() {
        for c in fixtures::all_exact() {
            for seg in segments(&c).unwrap() {
                let d = seg.degree;
                let s = extraction_matrix(c.knots(), d, seg.interval).unwrap();
                for j in 0..=d {
                    let coeff: Rational = (0..=d)
                        .map(|i| s.get(j, i).clone() * c.weights()[seg.interval - d + i].clone())
                        .sum();
                    assert!(coeff > q(0, 1), "Bernstein coefficient of f0");
                }
                for j in 0..20 {
                    let t = q(j, 20);
                    let u = seg.to_global(&t);
                    assert_eq!(seg.eval(&t), c.eval(&u).unwrap());
                }
            }
        }
    }

    #[test]
    fn bernstein_partition() {
        let sum = (0..=4).fold(UnivariatePoly::<Rational>::zero(), |acc, j| &acc + &bernstein(4, j));
        assert_eq!(sum, UnivariatePoly::constant(q(1, 1)));
    }
}
