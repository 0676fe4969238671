use std::cmp::Ordering;

use crate::bezier::{segment_homogeneous, BezierSegment};
use crate::bspline::{NurbsCurve, Point};
use crate::error::{Error, Result};
use crate::ratpoly::{Backend, BivariatePoly, Rational, Scalar, UnivariatePoly};

use super::local::{active_triple_det, build_local_inverse, quadratic_closed_form, LocalInverse};
use super::sylvester::sylvester;

/// One segment of the piecewise inverse.
#[derive(Clone, Debug)]
pub struct InverseSegment<S> {
    pub bezier: BezierSegment<S>,
    pub local: LocalInverse<S>,
}

impl<S: Scalar> InverseSegment<S> {
    pub fn interval(&self) -> usize {
        self.bezier.interval
    }

    pub fn u_lo(&self) -> &S {
        &self.bezier.u_lo
    }

    pub fn u_hi(&self) -> &S {
        &self.bezier.u_hi
    }

    /// Global inverse on this segment, `((u_hi - u_lo) N + u_lo D) / D`.
    pub fn global_rational(&self) -> (BivariatePoly<S>, BivariatePoly<S>) {
        let n = self.local.numerator();
        let d = self.local.denominator();
        let len = self.u_hi().clone() - self.u_lo().clone();
        (&n.scale(&len) + &d.scale(self.u_lo()), d.clone())
    }

    /// Local parameters `t` proposed for `(x, y)`; normally exactly one.
    ///
    /// Where all minor branches degenerate, exact values come from the
    /// common roots of `X(t)` and `Y(t)`, and float values are refined by
    /// Gauss-Newton steps on `psi(t) = (x, y)`.
    pub fn local_parameters(&self, x: &S, y: &S) -> Vec<S> {
        match self.local.eval_weighted(x, y) {
            Some((t, rel)) if S::BACKEND == Backend::Exact || rel >= POLISH_BELOW => vec![t],
            Some((t, _)) => {
                let t = self.polish(t, x, y);
                // far from this segment the iteration may diverge
                if t.to_f64().is_finite() {
                    vec![t]
                } else {
                    Vec::new()
                }
            }
            None if S::BACKEND == Backend::Exact => self.common_roots(x, y),
            None => Vec::new(),
        }
    }

    /// Global parameter of an on-curve point of this segment.
    pub fn eval(&self, x: &S, y: &S) -> Option<S> {
        self.local_parameters(x, y)
            .into_iter()
            .next()
            .map(|t| self.bezier.to_global(&t))
    }

    /// Rational roots of `gcd(f1 - x f0, f2 - y f0)` up to degree two.
    fn common_roots(&self, x: &S, y: &S) -> Vec<S> {
        let [f0, f1, f2] = &self.bezier.f;
        let g = (f1 - &f0.scale(x)).gcd(&(f2 - &f0.scale(y)));
        match g.degree() {
            Some(1) => vec![-g.coeff(0) / g.coeff(1)],
            Some(2) => {
                // monic t^2 + b t + c
                let (b, c) = (g.coeff(1), g.coeff(0));
                let disc = b.clone() * b.clone() - S::from_int(4) * c;
                let Some(r) = disc.sqrt_exact() else {
                    return Vec::new();
                };
                let two = S::from_int(2);
                let mut roots = vec![(-b.clone() - r.clone()) / two.clone(), (-b + r) / two];
                roots.dedup();
                roots
            }
            _ => Vec::new(),
        }
    }

    fn polish(&self, mut t: S, x: &S, y: &S) -> S {
        let [f0, f1, f2] = &self.bezier.f;
        let d: [UnivariatePoly<S>; 3] = [f0.derivative(), f1.derivative(), f2.derivative()];
        for _ in 0..POLISH_STEPS {
            let w = f0.eval(&t);
            let dw = d[0].eval(&t);
            let mut grad = S::zero();
            let mut norm = S::zero();
            for (i, target) in [(1, x), (2, y)] {
                let v = self.bezier.f[i].eval(&t);
                let r = v.clone() / w.clone() - target.clone();
                let dv = (d[i].eval(&t) * w.clone() - v * dw.clone()) / (w.clone() * w.clone());
                grad = grad + r * dv.clone();
                norm = norm + dv.clone() * dv;
            }
            if norm.is_zero() {
                break;
            }
            let step = grad / norm;
            t = t - step.clone();
            if step.to_f64().abs() < 1e-16 {
                break;
            }
        }
        t
    }
}

/// Relative denominator size below which float values are refined.
const POLISH_BELOW: f64 = 1e-5;
const POLISH_STEPS: usize = 20;

/// Explicit inverse of a curve, one rational map per active interval.
#[derive(Clone, Debug)]
pub struct PiecewiseInverse<S> {
    curve: NurbsCurve<S>,
    segments: Vec<InverseSegment<S>>,
}

/// A preimage of a query point.
#[derive(Clone, Debug, PartialEq)]
pub struct Preimage<S> {
    pub u: S,
    /// Knot interval index `k` of the segment that produced `u`.
    pub segment: usize,
    /// Euclidean distance `|phi(u) - point|`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreimageResult<S> {
    /// Candidates sorted by residual, then parameter.
    pub candidates: Vec<Preimage<S>>,
    pub multivalued: bool,
}

impl<S: Scalar> PreimageResult<S> {
    pub fn best(&self) -> &Preimage<S> {
        &self.candidates[0]
    }
}

/// Merges candidates that denote the same parameter and sorts them.
pub(crate) fn finish_candidates<S: Scalar>(
    mut found: Vec<Preimage<S>>,
    merge_radius: f64,
) -> Result<PreimageResult<S>> {
    found.sort_by(|a, b| a.u.partial_cmp(&b.u).unwrap_or(Ordering::Equal));
    let mut merged: Vec<Preimage<S>> = Vec::new();
    for c in found {
        match merged.last_mut() {
            // at a shared knot the later segment owns the parameter
            Some(prev) if (c.u.to_f64() - prev.u.to_f64()).abs() <= merge_radius || c.u == prev.u => {
                if c.segment > prev.segment || c.residual < prev.residual {
                    *prev = c;
                }
            }
            _ => merged.push(c),
        }
    }
    if merged.is_empty() {
        return Err(Error::PointNotOnCurve);
    }
    merged.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .unwrap_or(Ordering::Equal)
            .then(a.u.partial_cmp(&b.u).unwrap_or(Ordering::Equal))
    });
    let multivalued = merged.len() > 1;
    Ok(PreimageResult {
        candidates: merged,
        multivalued,
    })
}

impl PiecewiseInverse<Rational> {
    /// Builds the inverse from Sylvester minors on every active interval.
    pub fn new(curve: &NurbsCurve<Rational>) -> Result<Self> {
        let segments = curve
            .knots()
            .active_intervals()
            .iter()
            .map(|iv| {
                let bezier = segment_homogeneous(curve, iv.index)?;
                let local = build_local_inverse(&sylvester(&bezier))?;
                Ok(InverseSegment { bezier, local })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            curve: curve.clone(),
            segments,
        })
    }

    /// Builds a quadratic inverse from the closed determinant formula.
    pub fn quadratic(curve: &NurbsCurve<Rational>) -> Result<Self> {
        let segments = curve
            .knots()
            .active_intervals()
            .iter()
            .map(|iv| {
                Ok(InverseSegment {
                    bezier: segment_homogeneous(curve, iv.index)?,
                    local: quadratic_closed_form(curve, iv.index)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            curve: curve.clone(),
            segments,
        })
    }

    /// Float evaluator; polynomials are built exactly and then rounded.
    pub fn to_float(&self) -> PiecewiseInverse<f64> {
        PiecewiseInverse {
            curve: self.curve.cast(),
            segments: self
                .segments
                .iter()
                .map(|s| InverseSegment {
                    bezier: s.bezier.cast(),
                    local: s.local.to_float(),
                })
                .collect(),
        }
    }
}

impl PiecewiseInverse<f64> {
    /// Float inverse of a float curve: the curve data are converted exactly
    /// to rationals, the inverse is built exactly, then rounded.
    pub fn from_float_curve(curve: &NurbsCurve<f64>) -> Result<Self> {
        Ok(PiecewiseInverse::new(&curve.cast::<Rational>())?.to_float())
    }
}

impl<S: Scalar> PiecewiseInverse<S> {
    /// Plain coefficient conversion between backends.
    pub fn cast<T: Scalar>(&self) -> PiecewiseInverse<T> {
        PiecewiseInverse {
            curve: self.curve.cast(),
            segments: self
                .segments
                .iter()
                .map(|s| InverseSegment {
                    bezier: s.bezier.cast(),
                    local: s.local.cast(),
                })
                .collect(),
        }
    }

    pub fn curve(&self) -> &NurbsCurve<S> {
        &self.curve
    }

    pub fn segments(&self) -> &[InverseSegment<S>] {
        &self.segments
    }

    /// Position in `segments()` of knot interval `k`.
    pub fn segment_position(&self, k: usize) -> Option<usize> {
        self.segments.iter().position(|s| s.interval() == k)
    }

    /// Position of the segment owning parameter `u` (half-open intervals,
    /// the last segment owning the right end).
    pub fn segment_of_parameter(&self, u: &S) -> Result<usize> {
        let k = self.curve.knots().span(u)?;
        Ok(self.segment_position(k).expect("span is an active interval"))
    }

    /// Global parameter of `point` through segment `pos`, without any
    /// membership test.
    pub fn eval_on_segment(&self, pos: usize, point: &Point<S>) -> Option<S> {
        self.segments[pos].eval(&point[0], &point[1])
    }

    /// All parameters `u` with `|phi(u) - point| <= tol`.
    pub fn invert_point(&self, point: &Point<S>, tol: &S) -> Result<PreimageResult<S>> {
        if !tol.is_positive() {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        let (zero, one) = (S::zero(), S::one());
        let tol_sq = tol.clone() * tol.clone();
        let mut found = Vec::new();
        for seg in &self.segments {
            for t in seg.local_parameters(&point[0], &point[1]) {
                // written so that NaN is rejected
                if !(t >= zero.clone() - tol.clone() && t <= one.clone() + tol.clone()) {
                    continue;
                }
                let t = if t < zero {
                    zero.clone()
                } else if t > one {
                    one.clone()
                } else {
                    t
                };
                let [px, py] = seg.bezier.eval(&t);
                let (dx, dy) = (px - point[0].clone(), py - point[1].clone());
                let dist_sq = dx.clone() * dx + dy.clone() * dy;
                if !(dist_sq <= tol_sq) {
                    continue;
                }
                found.push(Preimage {
                    u: seg.bezier.to_global(&t),
                    segment: seg.interval(),
                    residual: dist_sq.to_f64().sqrt(),
                });
            }
        }
        finish_candidates(found, 10.0 * tol.to_f64())
    }

    pub fn global_rationals(&self) -> Vec<(usize, BivariatePoly<S>, BivariatePoly<S>)> {
        self.segments
            .iter()
            .map(|s| {
                let (n, d) = s.global_rational();
                (s.interval(), n, d)
            })
            .collect()
    }
}

/// Per-segment genericity verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentReport {
    pub interval: usize,
    pub general: bool,
    pub details: String,
}

/// Checks every active segment: for quadratics, that the active control
/// triple is not collinear; for every degree, that a local inverse exists
/// and reproduces `d + 2` sample parameters.
pub fn genericity_check(curve: &NurbsCurve<Rational>) -> Vec<SegmentReport> {
    let d = curve.degree();
    curve
        .knots()
        .active_intervals()
        .iter()
        .map(|iv| {
            let k = iv.index;
            let report = |general: bool, details: String| SegmentReport {
                interval: k,
                general,
                details,
            };
            if d == 2 && active_triple_det(curve, k) == Rational::from_int(0) {
                return report(false, format!("control points {}..={} are collinear", k - 2, k));
            }
            let seg = match segment_homogeneous(curve, k) {
                Ok(s) => s,
                Err(e) => return report(false, e.to_string()),
            };
            let local = match build_local_inverse(&sylvester(&seg)) {
                Ok(l) => l,
                Err(e) => return report(false, e.to_string()),
            };
            for j in 0..d + 2 {
                let t = Rational::from_ratio(j as i64, d as i64 + 1);
                let [x, y] = seg.eval(&t);
                if local.eval(&x, &y) != Some(t.clone()) {
                    return report(false, format!("round trip fails at local parameter {t}"));
                }
            }
            report(true, format!("round trip holds at {} samples", d + 2))
        })
        .collect()
}
