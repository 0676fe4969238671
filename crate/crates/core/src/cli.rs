//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bspline::{NurbsCurve, Point};
use crate::document::CurveDocument;
use crate::error::Error;
use crate::inverse::{genericity_check, PiecewiseInverse};
use crate::newton::{bench_compare, newton_invert, self_intersections, OracleConfig, SelfIntersection};
use crate::physical::{default_multiplicities, physical_knots, InverseSplineForm, PhysicalSpline};
use crate::ratpoly::{format_rational, parse_rational, BivariatePoly, Rational, Scalar};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NON_GENERAL: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Piecewise,
    Spline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotArg {
    Curve,
    Splines,
    Inverse,
}

#[derive(Debug, Parser)]
#[command(name = "nurbs-invert", version, about = "Explicit inversion of planar NURBS curves")]
struct Cli {
    /// Number backend for evaluation.
    #[arg(long, global = true, value_enum, default_value = "exact")]
    backend: BackendArg,
    /// Distance tolerance for accepting a preimage.
    #[arg(long, global = true, default_value = "1e-9")]
    tol: String,
    /// Degree of the physical splines.
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print `u x y` for each parameter.
    Eval {
        curve: PathBuf,
        #[arg(allow_hyphen_values = true, required = true)]
        u: Vec<String>,
    },
    /// Invert the `x y` lines of a file (`-` reads standard input).
    Invert { curve: PathBuf, points: PathBuf },
    /// Print the inverse as a JSON document.
    InverseRepr {
        curve: PathBuf,
        #[arg(long, value_enum, default_value = "piecewise")]
        form: FormArg,
    },
    /// Run the invariant suite against a curve.
    Check { curve: PathBuf },
    /// Write columnar data files for plotting.
    PlotData {
        curve: PathBuf,
        #[arg(long, value_enum)]
        what: PlotArg,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Time the explicit inverse against the Newton oracle.
    Bench {
        curve: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        points: usize,
    },
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonGeneralSegment { .. } | Error::CollinearTriple { .. } => EXIT_NON_GENERAL,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_VALIDATION;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let tol = parse_rational(&cli.tol)?;
    if !tol.is_positive() {
        return Err(Error::Config("--tol must be positive".into()).into());
    }
    match &cli.command {
        Command::Eval { curve, u } => cmd_eval(&load(curve)?, u, cli.backend, out),
        Command::Invert { curve, points } => {
            cmd_invert(&load(curve)?, points, &tol, cli.backend, out)
        }
        Command::InverseRepr { curve, form } => {
            cmd_inverse_repr(&load(curve)?, *form, cli.degree.unwrap_or(1), cli.backend, out)
        }
        Command::Check { curve } => {
            let c = load(curve)?;
            let degrees = match cli.degree {
                Some(p) => vec![p],
                None => vec![1, 2],
            };
            let report = check_suite(&c, &degrees);
            for line in &report.lines {
                writeln!(out, "{line}")?;
            }
            Ok(if report.passed() { EXIT_OK } else { report.exit_code() })
        }
        Command::PlotData {
            curve,
            what,
            samples,
            out: dir,
        } => cmd_plot_data(&load(curve)?, *what, *samples, cli.degree.unwrap_or(1), dir, out),
        Command::Bench { curve, points } => {
            let inv = PiecewiseInverse::new(&load(curve)?)?.to_float();
            let cfg = OracleConfig {
                tolerance: tol.to_f64(),
                ..OracleConfig::default()
            };
            let report = bench_compare(&inv, *points, &cfg)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"))?;
            Ok(EXIT_OK)
        }
    }
}

fn load(path: &Path) -> std::result::Result<NurbsCurve<Rational>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_VALIDATION,
        message: format!("{}: {e}", path.display()),
    })?;
    Ok(CurveDocument::from_json(&text)?.to_curve()?)
}

fn show<S: Scalar>(v: &S) -> String {
    match S::BACKEND {
        crate::ratpoly::Backend::Exact => format_rational(&v.to_rational()),
        crate::ratpoly::Backend::Float => format!("{}", v.to_f64()),
    }
}

fn cmd_eval(c: &NurbsCurve<Rational>, us: &[String], backend: BackendArg, out: &mut dyn Write) -> CmdResult {
    for text in us {
        let u = parse_rational(text)?;
        let line = match backend {
            BackendArg::Exact => {
                let [x, y] = c.eval(&u)?;
                format!("{} {} {}", show(&u), show(&x), show(&y))
            }
            BackendArg::Float => {
                let uf: f64 = u.cast();
                let [x, y] = c.cast::<f64>().eval(&uf)?;
                format!("{} {} {}", show(&uf), show(&x), show(&y))
            }
        };
        writeln!(out, "{line}")?;
    }
    Ok(EXIT_OK)
}

fn read_points(path: &Path) -> std::result::Result<Vec<(String, String)>, Failure> {
    let reader: Box<dyn BufRead> = if path == Path::new("-") {
        Box::new(io::BufReader::new(io::stdin()))
    } else {
        Box::new(io::BufReader::new(fs::File::open(path).map_err(|e| Failure {
            code: EXIT_VALIDATION,
            message: format!("{}: {e}", path.display()),
        })?))
    };
    let mut points = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut it = t.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(x), Some(y), None) => points.push((x.to_string(), y.to_string())),
            _ => {
                return Err(Failure {
                    code: EXIT_VALIDATION,
                    message: format!("expected `x y`, found {t:?}"),
                })
            }
        }
    }
    Ok(points)
}

/// Output records for one query point.
fn invert_records<S: Scalar>(inv: &PiecewiseInverse<S>, x: &str, y: &str, point: &Point<S>, tol: &S) -> Vec<String> {
    match inv.invert_point(point, tol) {
        Ok(r) => r
            .candidates
            .iter()
            .map(|c| {
                let mut line = format!("{x} {y} {} {} {:e}", show(&c.u), c.segment, c.residual);
                if r.multivalued {
                    line.push_str(" MULTI");
                }
                line
            })
            .collect(),
        Err(_) => vec![format!("{x} {y} NOT_ON_CURVE")],
    }
}

fn cmd_invert(
    c: &NurbsCurve<Rational>,
    path: &Path,
    tol: &Rational,
    backend: BackendArg,
    out: &mut dyn Write,
) -> CmdResult {
    let texts = read_points(path)?;
    let points = texts
        .iter()
        .map(|(x, y)| Ok([parse_rational(x)?, parse_rational(y)?]))
        .collect::<crate::Result<Vec<Point<Rational>>>>()?;
    let inv = PiecewiseInverse::new(c)?;
    let records: Vec<Vec<String>> = match backend {
        BackendArg::Exact => texts
            .par_iter()
            .zip(&points)
            .map(|((x, y), p)| invert_records(&inv, x, y, p, tol))
            .collect(),
        BackendArg::Float => {
            let inv = inv.to_float();
            let tol: f64 = tol.cast();
            texts
                .par_iter()
                .zip(&points)
                .map(|((x, y), p)| invert_records(&inv, x, y, &[p[0].cast(), p[1].cast()], &tol))
                .collect()
        }
    };
    for line in records.iter().flatten() {
        writeln!(out, "{line}")?;
    }
    Ok(EXIT_OK)
}

fn poly_json<S: Scalar>(p: &BivariatePoly<S>) -> Value {
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by_key(|((ex, ey), _)| (*ex + *ey, *ey));
    Value::Array(
        terms
            .into_iter()
            .map(|((ex, ey), c)| json!({ "x": ex, "y": ey, "c": coeff_json(c) }))
            .collect(),
    )
}

fn coeff_json<S: Scalar>(c: &S) -> Value {
    match S::BACKEND {
        crate::ratpoly::Backend::Exact => Value::String(show(c)),
        crate::ratpoly::Backend::Float => json!(c.to_f64()),
    }
}

fn piecewise_json<S: Scalar>(inv: &PiecewiseInverse<S>) -> Value {
    let segments: Vec<Value> = inv
        .segments()
        .iter()
        .map(|s| {
            let (n, d) = s.global_rational();
            json!({
                "interval": s.interval(),
                "u_lo": coeff_json(s.u_lo()),
                "u_hi": coeff_json(s.u_hi()),
                "numerator": poly_json(&n),
                "denominator": poly_json(&d),
            })
        })
        .collect();
    json!({ "form": "piecewise", "segments": segments })
}

fn spline_json<S: Scalar>(form: &InverseSplineForm<S>) -> Value {
    let splines: Vec<Value> = form
        .splines()
        .iter()
        .map(|s| {
            let branches: Vec<Value> = s
                .branches()
                .iter()
                .map(|b| {
                    json!({
                        "interval": b.interval,
                        "numerator": poly_json(&b.numerator),
                        "denominator": poly_json(&b.denominator),
                    })
                })
                .collect();
            json!({ "index": s.index(), "branches": branches })
        })
        .collect();
    let knots: Vec<Value> = form
        .knots()
        .points()
        .iter()
        .map(|[x, y]| json!([coeff_json(x), coeff_json(y)]))
        .collect();
    json!({
        "form": "spline",
        "degree": form.degree(),
        "physical_knots": knots,
        "greville": form.greville().iter().map(coeff_json).collect::<Vec<_>>(),
        "self_intersecting": form.self_intersecting(),
        "splines": splines,
    })
}

fn cmd_inverse_repr(
    c: &NurbsCurve<Rational>,
    form: FormArg,
    p: usize,
    backend: BackendArg,
    out: &mut dyn Write,
) -> CmdResult {
    let inv = PiecewiseInverse::new(c)?;
    let doc = match (form, backend) {
        (FormArg::Piecewise, BackendArg::Exact) => piecewise_json(&inv),
        (FormArg::Piecewise, BackendArg::Float) => piecewise_json(&inv.to_float()),
        (FormArg::Spline, backend) => {
            let f = InverseSplineForm::new(Arc::new(inv), p)?;
            match backend {
                BackendArg::Exact => spline_json(&f),
                BackendArg::Float => spline_json(&f.to_float()),
            }
        }
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serializable"))?;
    Ok(EXIT_OK)
}

fn cmd_plot_data(
    c: &NurbsCurve<Rational>,
    what: PlotArg,
    samples: usize,
    p: usize,
    dir: &Path,
    out: &mut dyn Write,
) -> CmdResult {
    if samples < 2 {
        return Err(Error::Config("--samples must be at least 2".into()).into());
    }
    fs::create_dir_all(dir)?;
    let cf = c.cast::<f64>();
    let (a, b) = cf.domain();
    let us: Vec<f64> = (0..samples)
        .map(|j| if j + 1 == samples { b } else { a + (b - a) * j as f64 / (samples - 1) as f64 })
        .collect();
    let pts = us.iter().map(|u| cf.eval(u)).collect::<crate::Result<Vec<_>>>()?;
    let mut written = Vec::new();
    match what {
        PlotArg::Curve => {
            let body: String = us.iter().zip(&pts).map(|(u, [x, y])| format!("{u} {x} {y}\n")).collect();
            written.push(write_file(dir, "curve.dat", "# u x y\n", &body)?);
        }
        PlotArg::Inverse => {
            let inv = PiecewiseInverse::new(c)?.to_float();
            let lines: Vec<String> = pts
                .par_iter()
                .map(|pt| match inv.invert_point(pt, &1e-9) {
                    Ok(r) => format!("{} {} {}\n", pt[0], pt[1], r.best().u),
                    Err(_) => format!("{} {} nan\n", pt[0], pt[1]),
                })
                .collect();
            written.push(write_file(dir, "inverse.dat", "# x y u\n", &lines.concat())?);
        }
        PlotArg::Splines => {
            let inv = Arc::new(PiecewiseInverse::new(c)?);
            let knots = Arc::new(physical_knots(c, &default_multiplicities(c, p))?);
            let count = knots.len().checked_sub(p + 1).filter(|n| *n > 0).ok_or_else(|| {
                Failure::from(Error::Config(format!("degree {p} leaves no physical splines")))
            })?;
            for k in 0..count {
                let s = PhysicalSpline::new(inv.clone(), knots.clone(), k, p)?.to_float();
                let lines = us
                    .par_iter()
                    .zip(&pts)
                    .map(|(u, pt)| {
                        let span = cf.knots().span(u)?;
                        Ok(format!("{} {} {}\n", pt[0], pt[1], s.eval(pt, Some(span))?))
                    })
                    .collect::<crate::Result<Vec<String>>>()?;
                written.push(write_file(dir, &format!("spline_{k}.dat"), "# x y value\n", &lines.concat())?);
            }
        }
    }
    for path in written {
        writeln!(out, "{}", path.display())?;
    }
    Ok(EXIT_OK)
}

fn write_file(dir: &Path, name: &str, header: &str, body: &str) -> io::Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, format!("{header}{body}"))?;
    Ok(path)
}

/// One line of the invariant suite.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub note: Option<String>,
    /// Whether a failure means the curve is non-general rather than that an
    /// invariant broke.
    pub structural: bool,
}

impl std::fmt::Display for CheckLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {} max_error={:e}", self.name, self.max_error)?;
        if let Some(n) = &self.note {
            write!(f, " ({n})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
    pub self_intersections: Vec<SelfIntersection>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    fn exit_code(&self) -> i32 {
        if self.lines.iter().any(|l| !l.passed && l.structural) {
            EXIT_NON_GENERAL
        } else {
            EXIT_INVARIANT
        }
    }
}

fn line(name: impl Into<String>, max_error: f64, limit: f64) -> CheckLine {
    CheckLine {
        name: name.into(),
        passed: max_error <= limit,
        max_error,
        note: None,
        structural: false,
    }
}

/// Runs the invariant suite of every module on one curve.
pub fn check_suite(c: &NurbsCurve<Rational>, degrees: &[usize]) -> CheckReport {
    let mut lines = Vec::new();
    let cf = c.cast::<f64>();
    let (a, b) = c.domain();
    let crossings = self_intersections(&cf);
    let near_crossing = |u: f64| crossings.iter().any(|x| (x.u1 - u).abs() < 1e-6 || (x.u2 - u).abs() < 1e-6);
    let exact_samples: Vec<Rational> = (0..=40)
        .map(|j| a.clone() + (b.clone() - a.clone()) * Rational::from_ratio(j * 3 + 1, 40 * 3 + 2))
        .collect();
    let (af, bf) = (a.to_f64(), b.to_f64());

    // genericity
    let reports = genericity_check(c);
    let bad: Vec<String> = reports.iter().filter(|r| !r.general).map(|r| format!("segment {}: {}", r.interval, r.details)).collect();
    lines.push(CheckLine {
        name: "genericity".into(),
        passed: bad.is_empty(),
        max_error: 0.0,
        note: (!bad.is_empty()).then(|| bad.join("; ")),
        structural: true,
    });
    if !bad.is_empty() {
        return CheckReport {
            lines,
            self_intersections: crossings,
        };
    }

    let partition = exact_samples
        .iter()
        .map(|u| {
            let s: Rational = (0..c.control_points().len()).map(|k| c.knots().basis(c.degree(), k, u).unwrap()).sum();
            (s - Rational::from_int(1)).abs().to_f64()
        })
        .fold(0.0, f64::max);
    lines.push(line("basis partition of unity (exact)", partition, 0.0));

    let inv = match PiecewiseInverse::new(c) {
        Ok(inv) => inv,
        Err(e) => {
            lines.push(CheckLine {
                name: "inverse construction".into(),
                passed: false,
                max_error: f64::INFINITY,
                note: Some(e.to_string()),
                structural: true,
            });
            return CheckReport {
                lines,
                self_intersections: crossings,
            };
        }
    };
    let finv = inv.to_float();
    let tol = Rational::from_ratio(1, 1_000_000_000);

    let mut err = 0.0f64;
    for u in exact_samples.iter().filter(|u| !near_crossing(u.to_f64())) {
        let got = inv.invert_point(&c.eval(u).unwrap(), &tol).map(|r| (r.best().u.clone() - u.clone()).abs().to_f64());
        err = err.max(got.unwrap_or(f64::INFINITY));
    }
    lines.push(line("round trip (exact)", err, 0.0));

    let knots: Vec<f64> = c.knots().reduced().0.iter().map(|k| k.to_f64()).collect();
    let mut err = 0.0f64;
    for j in 0..=1000 {
        let u = af + (bf - af) * j as f64 / 1000.0;
        if near_crossing(u) || knots.iter().any(|k| (k - u).abs() < 1e-6 && *k != af && *k != bf) {
            continue;
        }
        let got = finv.invert_point(&cf.eval(&u).unwrap(), &1e-9).map(|r| (r.best().u - u).abs());
        err = err.max(got.unwrap_or(f64::INFINITY));
    }
    lines.push(line("round trip (float)", err, 1e-9));

    let cfg = OracleConfig::default();
    let mut err = 0.0f64;
    for j in 0..200 {
        let u = af + (bf - af) * (j as f64 + 0.5) / 200.0;
        if near_crossing(u) {
            continue;
        }
        let p = cf.eval(&u).unwrap();
        let gap = match (finv.invert_point(&p, &1e-9), newton_invert(&cf, &p, &cfg)) {
            (Ok(x), Ok(y)) => (x.best().u - y.best().u).abs(),
            _ => f64::INFINITY,
        };
        err = err.max(gap);
    }
    lines.push(line("Newton oracle agreement", err, 1e-7));

    for x in &crossings {
        let r = finv.invert_point(&x.point, &1e-8);
        let count = r.as_ref().map(|r| r.candidates.len()).unwrap_or(0);
        let mut l = line("self-intersection multivalued", if count == 2 { 0.0 } else { 1.0 }, 0.0);
        l.note = Some(format!("self-intersection detected at u1={:.6}, u2={:.6}", x.u1, x.u2));
        lines.push(l);
    }

    let inv = Arc::new(inv);
    for &p in degrees {
        lines.extend(spline_checks(c, &inv, p, &exact_samples, &near_crossing));
    }
    CheckReport {
        lines,
        self_intersections: crossings,
    }
}

fn spline_checks(
    c: &NurbsCurve<Rational>,
    inv: &Arc<PiecewiseInverse<Rational>>,
    p: usize,
    samples: &[Rational],
    near_crossing: &dyn Fn(f64) -> bool,
) -> Vec<CheckLine> {
    let form = match InverseSplineForm::new(inv.clone(), p) {
        Ok(f) => f,
        Err(e) => {
            return vec![CheckLine {
                name: format!("spline form p={p}"),
                passed: false,
                max_error: f64::INFINITY,
                note: Some(e.to_string()),
                structural: false,
            }]
        }
    };
    let v = form.knots().parametric();
    let ff = form.to_float();
    let cf = c.cast::<f64>();
    let vf = v.cast::<f64>();
    let mut pullback = 0.0f64;
    let mut pullback_f = 0.0f64;
    let mut partition = 0.0f64;
    let mut negative = 0.0f64;
    let mut support = 0.0f64;
    let mut agreement = 0.0f64;
    for u in samples {
        let pt = c.eval(u).unwrap();
        let span = c.knots().span(u).unwrap();
        let uf = u.to_f64();
        let ptf = cf.eval(&uf).unwrap();
        let mut sum = Rational::from_int(0);
        for (k, (s, sf)) in form.splines().iter().zip(ff.splines()).enumerate() {
            let val = s.eval(&pt, Some(span)).unwrap();
            pullback = pullback.max((val.clone() - v.basis(p, k, u).unwrap()).abs().to_f64());
            let valf = sf.eval(&ptf, Some(span)).unwrap();
            pullback_f = pullback_f.max((valf - vf.basis(p, k, &uf).unwrap()).abs());
            if val.is_negative() {
                negative = negative.max(-val.to_f64());
            }
            if s.branch(span).is_none() {
                support = support.max(val.abs().to_f64());
            }
            sum = sum + val;
        }
        partition = partition.max((sum - Rational::from_int(1)).abs().to_f64());
        if !near_crossing(uf) {
            let spline_value = form.eval(&pt, Some(span)).unwrap();
            agreement = agreement.max((spline_value - u.clone()).abs().to_f64());
        }
    }
    vec![
        line(format!("pullback identity p={p} (exact)"), pullback, 0.0),
        line(format!("pullback identity p={p} (float)"), pullback_f, 1e-11),
        line(format!("spline partition of unity p={p}"), partition, 0.0),
        line(format!("spline nonnegativity p={p}"), negative, 0.0),
        line(format!("spline local support p={p}"), support, 0.0),
        line(format!("spline form equals inverse p={p}"), agreement, 0.0),
    ]
}
