//! Physical knot vectors on the curve, physical rational splines built by
//! the curve-side Cox-de Boor recursion, and the spline form of the inverse.

use std::sync::Arc;

use crate::bspline::{KnotVector, NurbsCurve, Point};
use crate::error::{Error, Result};
use crate::inverse::PiecewiseInverse;
use crate::ratpoly::{Backend, BivariatePoly, Rational, Scalar};

/// Knots `U_0..U_M` on the curve together with their parametric preimages.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalKnotVector<S> {
    points: Vec<Point<S>>,
    preimages: Vec<S>,
    multiplicities: Vec<usize>,
}

impl<S: Scalar> PhysicalKnotVector<S> {
    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    /// `u`-values of the knots, repeated like the points.
    pub fn parametric_preimages(&self) -> &[S] {
        &self.preimages
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distinct physical knots `U'_j`.
    pub fn distinct(&self) -> Vec<Point<S>> {
        let mut out: Vec<Point<S>> = Vec::new();
        let mut at = 0;
        for m in &self.multiplicities {
            out.push(self.points[at].clone());
            at += m;
        }
        out
    }

    /// Parametric knot vector with the same repetition pattern.
    pub fn parametric(&self) -> KnotVector<S> {
        KnotVector::new(self.preimages.clone()).expect("preimages are sorted")
    }

    pub fn cast<T: Scalar>(&self) -> PhysicalKnotVector<T> {
        PhysicalKnotVector {
            points: self.points.iter().map(|[x, y]| [x.cast(), y.cast()]).collect(),
            preimages: self.preimages.iter().map(|u| u.cast()).collect(),
            multiplicities: self.multiplicities.clone(),
        }
    }
}

/// Multiplicities mirroring the curve's knot vector, with both ends set to
/// `p + 1`.
pub fn default_multiplicities<S: Scalar>(curve: &NurbsCurve<S>, p: usize) -> Vec<usize> {
    let (_, mut mults) = curve.knots().reduced();
    let last = mults.len() - 1;
    mults[0] = p + 1;
    mults[last] = p + 1;
    mults
}

/// Physical knots `U'_j = phi(u'_j)`, each repeated `multiplicities[j]` times.
pub fn physical_knots<S: Scalar>(
    curve: &NurbsCurve<S>,
    multiplicities: &[usize],
) -> Result<PhysicalKnotVector<S>> {
    let (values, _) = curve.knots().reduced();
    if multiplicities.len() != values.len() {
        return Err(Error::MultiplicityMismatch(format!(
            "{} multiplicities for {} distinct knots",
            multiplicities.len(),
            values.len()
        )));
    }
    if let Some(j) = multiplicities.iter().position(|&m| m == 0) {
        return Err(Error::MultiplicityMismatch(format!("knot {j} has multiplicity 0")));
    }
    let mut points = Vec::new();
    let mut preimages = Vec::new();
    for (u, &m) in values.iter().zip(multiplicities) {
        let pt = curve.eval(u)?;
        for _ in 0..m {
            points.push(pt.clone());
            preimages.push(u.clone());
        }
    }
    Ok(PhysicalKnotVector {
        points,
        preimages,
        multiplicities: multiplicities.to_vec(),
    })
}

/// Restriction of a physical spline to one segment, `numerator / denominator`.
#[derive(Clone, Debug, PartialEq)]
pub struct SplineBranch<S> {
    /// Knot interval index of the segment.
    pub interval: usize,
    pub numerator: BivariatePoly<S>,
    pub denominator: BivariatePoly<S>,
}

/// The `k`-th physical rational spline of degree `p`.
#[derive(Clone, Debug)]
pub struct PhysicalSpline<S> {
    index: usize,
    degree: usize,
    branches: Vec<SplineBranch<S>>,
    knots: Arc<PhysicalKnotVector<S>>,
    inverse: Arc<PiecewiseInverse<S>>,
}

/// Homogenized recursion on one segment: with `u = a / d`, returns
/// `N_{k,p}(u) d^p` restricted to the parametric interval `owner`.
fn segment_recursion<S: Scalar>(
    v: &[S],
    k: usize,
    p: usize,
    owner: usize,
    a: &BivariatePoly<S>,
    d: &BivariatePoly<S>,
) -> BivariatePoly<S> {
    let one = BivariatePoly::constant(S::one());
    let mut level: Vec<BivariatePoly<S>> = (k..=k + p)
        .map(|i| if i == owner { one.clone() } else { BivariatePoly::zero() })
        .collect();
    for q in 1..=p {
        level = (0..=p - q)
            .map(|off| {
                let i = k + off;
                let mut acc = BivariatePoly::zero();
                let left = v[i + q].clone() - v[i].clone();
                if !left.is_zero() && !level[off].is_zero() {
                    let lin = a - &d.scale(&v[i]);
                    acc = &acc + &(&lin * &level[off]).scale(&(S::one() / left));
                }
                let right = v[i + q + 1].clone() - v[i + 1].clone();
                if !right.is_zero() && !level[off + 1].is_zero() {
                    let lin = &d.scale(&v[i + q + 1]) - a;
                    acc = &acc + &(&lin * &level[off + 1]).scale(&(S::one() / right));
                }
                acc
            })
            .collect();
    }
    level.swap_remove(0)
}

/// Index `j` with `[v_j, v_{j+1}) = [lo, hi)`.
fn owning_interval<S: Scalar>(v: &[S], lo: &S, hi: &S) -> Option<usize> {
    v.windows(2).position(|w| w[0] == *lo && w[1] == *hi)
}

/// Float results whose estimated rounding error exceeds this are recomputed
/// from the located parameter.
const FLOAT_TRUST: f64 = 1e-13;

impl<S: Scalar> PhysicalSpline<S> {
    pub fn new(
        inverse: Arc<PiecewiseInverse<S>>,
        knots: Arc<PhysicalKnotVector<S>>,
        k: usize,
        p: usize,
    ) -> Result<Self> {
        let count = knots.len().saturating_sub(p + 1);
        if k >= count {
            return Err(Error::IndexOutOfRange { index: k, limit: count });
        }
        let (curve_values, _) = inverse.curve().knots().reduced();
        let mut distinct = knots.parametric_preimages().to_vec();
        distinct.dedup();
        if distinct != curve_values {
            return Err(Error::MultiplicityMismatch(
                "physical knots do not lie over the curve's knots".into(),
            ));
        }
        let v = knots.parametric_preimages();
        let mut branches = Vec::new();
        for seg in inverse.segments() {
            let Some(owner) = owning_interval(v, seg.u_lo(), seg.u_hi()) else {
                continue;
            };
            if owner < k || owner > k + p {
                continue;
            }
            let (a, d) = seg.global_rational();
            let numerator = segment_recursion(v, k, p, owner, &a, &d);
            if numerator.is_zero() {
                continue;
            }
            branches.push(SplineBranch {
                interval: seg.interval(),
                numerator,
                denominator: d.pow(p as u32),
            });
        }
        Ok(Self {
            index: k,
            degree: p,
            branches,
            knots,
            inverse,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn branches(&self) -> &[SplineBranch<S>] {
        &self.branches
    }

    pub fn knots(&self) -> &PhysicalKnotVector<S> {
        &self.knots
    }

    pub fn inverse(&self) -> &PiecewiseInverse<S> {
        &self.inverse
    }

    pub fn branch(&self, interval: usize) -> Option<&SplineBranch<S>> {
        self.branches.iter().find(|b| b.interval == interval)
    }

    /// Value at an on-curve point. With `segment_hint` (a knot interval
    /// index) the branch of that segment is used; otherwise the point is
    /// located by inversion.
    pub fn eval(&self, point: &Point<S>, segment_hint: Option<usize>) -> Result<S> {
        let interval = match segment_hint {
            Some(k) => k,
            None => locate(&self.inverse, point)?,
        };
        self.eval_on_interval(interval, point)
    }

    fn eval_on_interval(&self, interval: usize, point: &Point<S>) -> Result<S> {
        let pos = self
            .inverse
            .segment_position(interval)
            .ok_or(Error::InactiveInterval(interval))?;
        let Some(branch) = self.branch(interval) else {
            return Ok(S::zero());
        };
        let (num, num_mass) = branch.numerator.eval_with_scale(&point[0], &point[1]);
        let (den, den_mass) = branch.denominator.eval_with_scale(&point[0], &point[1]);
        if !den.is_zero() {
            let value = num / den.clone();
            let trusted = match S::BACKEND {
                Backend::Exact => true,
                Backend::Float => {
                    let err = 8.0 * f64::EPSILON * (num_mass + value.to_f64().abs() * den_mass)
                        / den.to_f64().abs();
                    err <= FLOAT_TRUST
                }
            };
            if trusted {
                return Ok(value);
            }
        }
        // the stored quotient degenerates here; rerun the recursion at the
        // located parameter instead
        let seg = &self.inverse.segments()[pos];
        let t = seg
            .local_parameters(&point[0], &point[1])
            .into_iter()
            .next()
            .ok_or(Error::PointNotOnCurve)?;
        let u = BivariatePoly::constant(seg.bezier.to_global(&t));
        let v = self.knots.parametric_preimages();
        let owner = owning_interval(v, seg.u_lo(), seg.u_hi()).expect("branch segment is a knot span");
        let one = BivariatePoly::constant(S::one());
        Ok(segment_recursion(v, self.index, self.degree, owner, &u, &one).coeff(0, 0))
    }

    /// Float copy; each branch is scaled so its denominator's largest
    /// coefficient is one.
    pub fn to_float(&self) -> PhysicalSpline<f64> {
        self.to_float_sharing(
            Arc::new(to_float_inverse(&self.inverse)),
            Arc::new(self.knots.cast()),
        )
    }

    fn to_float_sharing(
        &self,
        inverse: Arc<PiecewiseInverse<f64>>,
        knots: Arc<PhysicalKnotVector<f64>>,
    ) -> PhysicalSpline<f64> {
        PhysicalSpline {
            index: self.index,
            degree: self.degree,
            branches: self
                .branches
                .iter()
                .map(|b| {
                    let big = b
                        .denominator
                        .terms()
                        .map(|(_, c)| c.abs().to_rational())
                        .max()
                        .unwrap_or_else(|| Rational::from_int(1));
                    let inv = S::from_rational(&big.recip());
                    SplineBranch {
                        interval: b.interval,
                        numerator: b.numerator.scale(&inv).cast(),
                        denominator: b.denominator.scale(&inv).cast(),
                    }
                })
                .collect(),
            knots,
            inverse,
        }
    }
}

fn to_float_inverse<S: Scalar>(inv: &PiecewiseInverse<S>) -> PiecewiseInverse<f64> {
    inv.cast::<Rational>().to_float()
}

/// Knot interval of the best preimage of an on-curve point.
fn locate<S: Scalar>(inverse: &PiecewiseInverse<S>, point: &Point<S>) -> Result<usize> {
    let tol = S::from_f64(1e-9);
    Ok(inverse.invert_point(point, &tol)?.best().segment)
}

/// `phi^{-1} = sum_i xi_{i,p} N_{i,p}` on the curve.
#[derive(Clone, Debug)]
pub struct InverseSplineForm<S> {
    degree: usize,
    greville: Vec<S>,
    splines: Vec<PhysicalSpline<S>>,
    knots: Arc<PhysicalKnotVector<S>>,
    inverse: Arc<PiecewiseInverse<S>>,
    self_intersecting: bool,
}

impl<S: Scalar> InverseSplineForm<S> {
    /// Builds the spline form of degree `p` over default multiplicities.
    pub fn new(inverse: Arc<PiecewiseInverse<S>>, p: usize) -> Result<Self> {
        let curve = inverse.curve();
        let m = curve.knots().len() - 1;
        if p == 0 || p + 1 > m {
            return Err(Error::Config(format!("spline degree {p} outside 1..={}", m - 1)));
        }
        let knots = Arc::new(physical_knots(curve, &default_multiplicities(curve, p))?);
        let greville = knots.parametric().greville(p)?;
        let splines = (0..greville.len())
            .map(|k| PhysicalSpline::new(inverse.clone(), knots.clone(), k, p))
            .collect::<Result<Vec<_>>>()?;
        let self_intersecting = !crate::newton::self_intersections(&curve.cast::<f64>()).is_empty();
        Ok(Self {
            degree: p,
            greville,
            splines,
            knots,
            inverse,
            self_intersecting,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn greville(&self) -> &[S] {
        &self.greville
    }

    pub fn splines(&self) -> &[PhysicalSpline<S>] {
        &self.splines
    }

    pub fn knots(&self) -> &PhysicalKnotVector<S> {
        &self.knots
    }

    /// Set when the curve crosses itself; values at the crossing are then
    /// ambiguous.
    pub fn self_intersecting(&self) -> bool {
        self.self_intersecting
    }

    pub fn eval(&self, point: &Point<S>, segment_hint: Option<usize>) -> Result<S> {
        let interval = match segment_hint {
            Some(k) => k,
            None => locate(&self.inverse, point)?,
        };
        self.splines.iter().zip(&self.greville).try_fold(S::zero(), |acc, (s, xi)| {
            let v = s.eval_on_interval(interval, point)?;
            Ok(acc + xi.clone() * v)
        })
    }

    /// Combined rational `sum_i xi_i P_i / D^p` on one segment.
    pub fn segment_rational(&self, interval: usize) -> Option<(BivariatePoly<S>, BivariatePoly<S>)> {
        let mut den = None;
        let mut num = BivariatePoly::zero();
        for (s, xi) in self.splines.iter().zip(&self.greville) {
            if let Some(b) = s.branch(interval) {
                num = &num + &b.numerator.scale(xi);
                den.get_or_insert_with(|| b.denominator.clone());
            }
        }
        den.map(|d| (num, d))
    }

    pub fn to_float(&self) -> InverseSplineForm<f64> {
        let inverse = Arc::new(to_float_inverse(&self.inverse));
        let knots = Arc::new(self.knots.cast());
        InverseSplineForm {
            degree: self.degree,
            greville: self.greville.iter().map(|g| g.cast()).collect(),
            splines: self
                .splines
                .iter()
                .map(|s| s.to_float_sharing(inverse.clone(), knots.clone()))
                .collect(),
            knots,
            inverse,
            self_intersecting: self.self_intersecting,
        }
    }
}

/// Derivative jumps of one order across a knot, one entry per step size.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderJumps {
    pub order: usize,
    pub jumps: Vec<f64>,
    pub continuous: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityReport {
    pub knot_index: usize,
    pub parameter: f64,
    pub multiplicity: usize,
    /// `p - mu` when nonnegative, the order the theory predicts.
    pub expected_order: Option<usize>,
    pub orders: Vec<OrderJumps>,
    /// Highest order through which every probed order is continuous;
    /// `None` when the values themselves jump.
    pub observed_order: Option<usize>,
}

/// Absolute jump below which an order counts as continuous outright.
const JUMP_FLOOR: f64 = 1e-9;

/// Probes the smoothness of `s o phi` at physical knot `knot_index` with
/// one-sided difference quotients of orders `0..=p - mu + 1` (capped at `p`).
pub fn continuity_probe<S: Scalar>(
    s: &PhysicalSpline<S>,
    knot_index: usize,
    h_list: &[S],
) -> Result<ContinuityReport> {
    let knots = s.knots();
    let v = knots.parametric_preimages();
    if knot_index >= v.len() {
        return Err(Error::IndexOutOfRange { index: knot_index, limit: v.len() });
    }
    if h_list.is_empty() || h_list.iter().any(|h| !h.is_positive()) {
        return Err(Error::Config("step sizes must be positive".into()));
    }
    let u0 = v[knot_index].clone();
    let inv = s.inverse();
    let segs = inv.segments();
    let left = segs.iter().find(|g| *g.u_hi() == u0).map(|g| g.interval());
    let right = segs.iter().find(|g| *g.u_lo() == u0).map(|g| g.interval());
    let (Some(left), Some(right)) = (left, right) else {
        return Err(Error::Config(format!("knot {knot_index} is not an interior knot")));
    };
    let mu = knots.parametric().multiplicity(&u0);
    let p = s.degree();
    let top = if mu <= p { (p - mu + 1).min(p) } else { 0 };
    let curve = inv.curve();
    let side = |interval: usize, u: S| -> Result<S> { s.eval(&curve.eval(&u)?, Some(interval)) };

    let mut orders = Vec::new();
    for r in 0..=top {
        let mut jumps = Vec::new();
        for h in h_list {
            let mut fwd = S::zero();
            let mut bwd = S::zero();
            for i in 0..=r {
                let c = S::from_int(binomial(r, i) as i64);
                let step = S::from_int(i as i64) * h.clone();
                let sign_f = if (r - i) % 2 == 0 { S::one() } else { -S::one() };
                let sign_b = if i % 2 == 0 { S::one() } else { -S::one() };
                fwd = fwd + sign_f * c.clone() * side(right, u0.clone() + step.clone())?;
                bwd = bwd + sign_b * c * side(left, u0.clone() - step)?;
            }
            let scale = h.powi(r as u32);
            jumps.push(((fwd - bwd) / scale).to_f64().abs());
        }
        let continuous = judge(&jumps, h_list);
        orders.push(OrderJumps { order: r, jumps, continuous });
    }
    let observed_order = orders.iter().take_while(|o| o.continuous).last().map(|o| o.order);
    Ok(ContinuityReport {
        knot_index,
        parameter: u0.to_f64(),
        multiplicity: mu,
        expected_order: p.checked_sub(mu),
        orders,
        observed_order,
    })
}

/// A jump is continuous when it is negligible or shrinks at least linearly
/// with the step.
fn judge<S: Scalar>(jumps: &[f64], h_list: &[S]) -> bool {
    let (imin, imax) = extremes(h_list);
    let small = jumps[imin];
    if small <= JUMP_FLOOR {
        return true;
    }
    if imin == imax {
        return false;
    }
    let ratio = h_list[imin].to_f64() / h_list[imax].to_f64();
    small <= 4.0 * ratio * jumps[imax]
}

fn extremes<S: Scalar>(h: &[S]) -> (usize, usize) {
    let mut imin = 0;
    let mut imax = 0;
    for (i, v) in h.iter().enumerate() {
        if *v < h[imin] {
            imin = i;
        }
        if *v > h[imax] {
            imax = i;
        }
    }
    (imin, imax)
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1))
}
