//! Iterative preimage solver used as an independent oracle and as the
//! timing baseline for the explicit inverse.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bspline::{NurbsCurve, Point};
use crate::error::{Error, Result};
use crate::inverse::{finish_candidates, PiecewiseInverse, Preimage, PreimageResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seeds_per_segment: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            tolerance: 1e-9,
            seeds_per_segment: 8,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("oracle tolerance must be positive".into()));
        }
        if self.seeds_per_segment < 3 {
            return Err(Error::Config("at least 3 seeds per segment are required".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// `g(u) = |phi(u) - p|^2` with its first two derivatives.
fn distance_jet(c: &NurbsCurve<f64>, u: f64, p: &Point<f64>) -> Result<[f64; 3]> {
    let [v, d1, d2] = c.eval_derivatives(&u)?;
    let r = [v[0] - p[0], v[1] - p[1]];
    let g = r[0] * r[0] + r[1] * r[1];
    let g1 = 2.0 * (r[0] * d1[0] + r[1] * d1[1]);
    let g2 = 2.0 * (d1[0] * d1[0] + d1[1] * d1[1] + r[0] * d2[0] + r[1] * d2[1]);
    Ok([g, g1, g2])
}

/// Newton on `g'(u) = 0` inside `[lo, hi]`; `None` if it leaves the
/// interval, meets nonpositive curvature or runs out of iterations.
fn newton_from(
    c: &NurbsCurve<f64>,
    p: &Point<f64>,
    mut u: f64,
    lo: f64,
    hi: f64,
    cfg: &OracleConfig,
) -> Result<Option<f64>> {
    for _ in 0..cfg.max_iterations {
        let [_, g1, g2] = distance_jet(c, u, p)?;
        if g1 == 0.0 {
            return Ok(Some(u));
        }
        if g2 <= 0.0 {
            return Ok(None);
        }
        let step = g1 / g2;
        let next = u - step;
        if !(lo..=hi).contains(&next) {
            // a minimum at the interval end is still a candidate
            let end = next.clamp(lo, hi);
            let g1_end = distance_jet(c, end, p)?[1];
            let minimum = (end == lo && g1_end >= 0.0) || (end == hi && g1_end <= 0.0);
            return Ok(minimum.then_some(end));
        }
        u = next;
        if step.abs() <= 4.0 * f64::EPSILON * u.abs().max(1.0) {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// Bisection on a sign change of `g'` from negative to positive.
fn bisect(c: &NurbsCurve<f64>, p: &Point<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if distance_jet(c, mid, p)?[1] < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// All local minimizers of `|phi(u) - point|` with distance at most the
/// tolerance, found per segment from uniformly spaced seeds.
pub fn newton_invert(
    c: &NurbsCurve<f64>,
    point: &Point<f64>,
    cfg: &OracleConfig,
) -> Result<PreimageResult<f64>> {
    cfg.validate()?;
    let tol = cfg.tolerance;
    let mut found = Vec::new();
    for iv in c.knots().active_intervals() {
        let (lo, hi) = (iv.lo, iv.hi);
        let n = cfg.seeds_per_segment;
        let seeds: Vec<f64> = (0..n)
            .map(|s| lo + (hi - lo) * s as f64 / (n - 1) as f64)
            .collect();
        let slopes = seeds
            .iter()
            .map(|&s| distance_jet(c, s, point).map(|j| j[1]))
            .collect::<Result<Vec<_>>>()?;
        let mut roots = Vec::new();
        for (i, &s) in seeds.iter().enumerate() {
            match newton_from(c, point, s, lo, hi, cfg)? {
                Some(u) => roots.push(u),
                None if i + 1 < n && slopes[i] < 0.0 && slopes[i + 1] >= 0.0 => {
                    roots.push(bisect(c, point, s, seeds[i + 1])?);
                }
                None => {}
            }
        }
        for u in roots {
            let [g, _, _] = distance_jet(c, u, point)?;
            if g <= tol * tol {
                found.push(Preimage {
                    u,
                    segment: iv.index,
                    residual: g.sqrt(),
                });
            }
        }
    }
    finish_candidates(found, 10.0 * tol)
}

/// Timing record for one inversion method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub name: String,
    pub points: usize,
    pub mean_ns: f64,
    pub p99_ns: f64,
    pub max_disagreement: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    /// Newton mean time over closed-form mean time.
    pub speedup: Option<f64>,
}

/// Inverts `n_points` on-curve points with the explicit inverse and with
/// the Newton oracle, timing each point.
pub fn bench_compare(
    inverse: &PiecewiseInverse<f64>,
    n_points: usize,
    cfg: &OracleConfig,
) -> Result<BenchReport> {
    cfg.validate()?;
    if n_points == 0 {
        return Ok(BenchReport {
            records: Vec::new(),
            speedup: None,
        });
    }
    let c = inverse.curve();
    let (a, b) = c.domain();
    let samples = (0..n_points)
        .map(|j| {
            let u = a + (b - a) * (j as f64 + 0.5) / n_points as f64;
            c.eval(&u).map(|p| (u, p))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut closed_ns = Vec::with_capacity(n_points);
    let mut newton_ns = Vec::with_capacity(n_points);
    let mut disagreement: f64 = 0.0;
    let tol = cfg.tolerance;
    for (_, p) in &samples {
        let t0 = Instant::now();
        let closed = inverse.invert_point(p, &tol);
        closed_ns.push(t0.elapsed().as_nanos() as f64);
        let t1 = Instant::now();
        let oracle = newton_invert(c, p, cfg);
        newton_ns.push(t1.elapsed().as_nanos() as f64);
        let gap = match (closed, oracle) {
            (Ok(x), Ok(y)) => {
                let u = x.best().u;
                y.candidates.iter().map(|c| (c.u - u).abs()).fold(f64::INFINITY, f64::min)
            }
            _ => f64::INFINITY,
        };
        disagreement = disagreement.max(gap);
    }
    let closed = record("closed_form", &mut closed_ns, disagreement);
    let newton = record("newton", &mut newton_ns, disagreement);
    let speedup = Some(newton.mean_ns / closed.mean_ns.max(1.0));
    Ok(BenchReport {
        records: vec![closed, newton],
        speedup,
    })
}

fn record(name: &str, ns: &mut [f64], max_disagreement: f64) -> BenchRecord {
    ns.sort_by(f64::total_cmp);
    let mean = ns.iter().sum::<f64>() / ns.len() as f64;
    let idx = ((ns.len() as f64 * 0.99).ceil() as usize).clamp(1, ns.len()) - 1;
    BenchRecord {
        name: name.into(),
        points: ns.len(),
        mean_ns: mean,
        p99_ns: ns[idx],
        max_disagreement,
    }
}

/// A transversal self-crossing `phi(u1) = phi(u2)` with `u1 < u2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfIntersection {
    pub u1: f64,
    pub u2: f64,
    pub point: Point<f64>,
}

const POLYLINE_SAMPLES: usize = 64;

/// Crossings located on a sampled polyline and refined by two-dimensional
/// Newton on `phi(u) - phi(v) = 0`.
pub fn self_intersections(c: &NurbsCurve<f64>) -> Vec<SelfIntersection> {
    let mut params = Vec::new();
    for iv in c.knots().active_intervals() {
        for s in 0..POLYLINE_SAMPLES {
            params.push(iv.lo + (iv.hi - iv.lo) * s as f64 / POLYLINE_SAMPLES as f64);
        }
    }
    params.push(c.domain().1);
    let pts: Vec<Point<f64>> = params.iter().map(|u| c.eval(u).expect("in domain")).collect();
    let (a, b) = c.domain();
    let mut out: Vec<SelfIntersection> = Vec::new();
    for i in 0..pts.len() - 1 {
        for j in i + 2..pts.len() - 1 {
            let Some((s, t)) = chord_crossing(&pts[i], &pts[i + 1], &pts[j], &pts[j + 1]) else {
                continue;
            };
            let u = params[i] + s * (params[i + 1] - params[i]);
            let v = params[j] + t * (params[j + 1] - params[j]);
            let Some((u, v)) = refine_crossing(c, u, v) else {
                continue;
            };
            if v - u <= 1e-6 * (b - a) || out.iter().any(|x| (x.u1 - u).abs() < 1e-9 && (x.u2 - v).abs() < 1e-9) {
                continue;
            }
            let point = c.eval(&u).expect("refined inside domain");
            out.push(SelfIntersection { u1: u, u2: v, point });
        }
    }
    out
}

/// Parameters `(s, t)` in `[0, 1]^2` where two chords cross.
fn chord_crossing(p0: &Point<f64>, p1: &Point<f64>, q0: &Point<f64>, q1: &Point<f64>) -> Option<(f64, f64)> {
    let r = [p1[0] - p0[0], p1[1] - p0[1]];
    let d = [q1[0] - q0[0], q1[1] - q0[1]];
    let den = r[0] * d[1] - r[1] * d[0];
    if den == 0.0 {
        return None;
    }
    let w = [q0[0] - p0[0], q0[1] - p0[1]];
    let s = (w[0] * d[1] - w[1] * d[0]) / den;
    let t = (w[0] * r[1] - w[1] * r[0]) / den;
    ((0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t)).then_some((s, t))
}

fn refine_crossing(c: &NurbsCurve<f64>, mut u: f64, mut v: f64) -> Option<(f64, f64)> {
    let (a, b) = c.domain();
    for _ in 0..50 {
        let [pu, du, _] = c.eval_derivatives(&u).ok()?;
        let [pv, dv, _] = c.eval_derivatives(&v).ok()?;
        let f = [pu[0] - pv[0], pu[1] - pv[1]];
        // J = [du, -dv]
        let det = du[0] * (-dv[1]) - (-dv[0]) * du[1];
        if det == 0.0 {
            return None;
        }
        let step_u = (f[0] * (-dv[1]) - (-dv[0]) * f[1]) / det;
        let step_v = (du[0] * f[1] - du[1] * f[0]) / det;
        u = (u - step_u).clamp(a, b);
        v = (v - step_v).clamp(a, b);
        if step_u.abs().max(step_v.abs()) < 1e-15 {
            break;
        }
    }
    let (pu, pv) = (c.eval(&u).ok()?, c.eval(&v).ok()?);
    let gap = (pu[0] - pv[0]).hypot(pu[1] - pv[1]);
    (gap < 1e-10).then_some((u.min(v), u.max(v)))
}
