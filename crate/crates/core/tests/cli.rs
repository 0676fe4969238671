use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use nurbs_invert::fixtures;
use nurbs_invert::ratpoly::{parse_rational, Rational};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nurbs-invert"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn q(text: &str) -> Rational {
    parse_rational(text).unwrap()
}

#[test]
fn eval_prints_exact_fractions() {
    let f = fixture("quadratic");
    let o = run(&["eval", f.to_str().unwrap(), "1/2", "0"]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines[0], "1/2 7/15 3/5");
    let c = fixtures::quadratic();
    let p0 = &c.control_points()[0];
    let want = format!("0 {} {}", p0[0], p0[1]);
    assert_eq!(lines[1], want);
}

#[test]
fn eval_outside_domain_fails() {
    let f = fixture("quadratic");
    let o = run(&["eval", f.to_str().unwrap(), "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside domain"));
}

#[test]
fn eval_float_backend() {
    let f = fixture("quadratic");
    let o = run(&["--backend", "float", "eval", f.to_str().unwrap(), "0.5"]);
    let fields: Vec<f64> = stdout(&o).split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert!((fields[1] - 7.0 / 15.0).abs() < 1e-15 && (fields[2] - 0.6).abs() < 1e-15);
}

#[test]
fn invert_batch_records() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.txt");
    fs::write(&pts, "7/15 3/5\n# comment\n100 100\n").unwrap();
    let f = fixture("quadratic");
    let o = run(&["invert", f.to_str().unwrap(), pts.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[0].split_whitespace().collect();
    assert_eq!(&fields[..4], &["7/15", "3/5", "1/2", "3"]);
    assert_eq!(lines[1], "100 100 NOT_ON_CURVE");
}

#[test]
fn invert_self_intersection_is_multi() {
    let c = fixtures::quintic().cast::<f64>();
    let x = &nurbs_invert::newton::self_intersections(&c)[0];
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.txt");
    fs::write(&pts, format!("{:e} {:e}\n", x.point[0], x.point[1])).unwrap();
    let f = fixture("quintic");
    for backend in ["exact", "float"] {
        let o = run(&["--backend", backend, "--tol", "1e-8", "invert", f.to_str().unwrap(), pts.to_str().unwrap()]);
        let out = stdout(&o);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2, "{backend}: {out}");
        assert!(lines.iter().all(|l| l.ends_with("MULTI")));
    }
}

#[test]
fn inverse_repr_piecewise_matches_displayed_formula() {
    let f = fixture("quadratic");
    let o = run(&["inverse-repr", f.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let segs = doc["segments"].as_array().unwrap();
    assert_eq!(segs.len(), 2);
    let eval = |poly: &serde_json::Value, x: &Rational, y: &Rational| -> Rational {
        poly.as_array()
            .unwrap()
            .iter()
            .map(|t| {
                let c = q(t["c"].as_str().unwrap());
                let ex = t["x"].as_u64().unwrap() as usize;
                let ey = t["y"].as_u64().unwrap() as usize;
                c * num_traits::pow(x.clone(), ex) * num_traits::pow(y.clone(), ey)
            })
            .sum()
    };
    let c = fixtures::quadratic();
    for (seg, (num, den), lo) in [
        (&segs[0], ((-31, 3, 0), (28, 31, -57)), 0),
        (&segs[1], ((255, 85, -136), (180, 55, -49)), 1),
    ] {
        for j in 1..10 {
            let u = q(&format!("{}/20", lo * 10 + j));
            let [x, y] = c.eval(&u).unwrap();
            let lin = |(a, b, k): (i64, i64, i64)| q(&a.to_string()) * x.clone() + q(&b.to_string()) * y.clone() + q(&k.to_string());
            let got = eval(&seg["numerator"], &x, &y) * lin(den);
            assert_eq!(got, eval(&seg["denominator"], &x, &y) * lin(num));
        }
    }
}

#[test]
fn inverse_repr_spline_lists_greville() {
    let f = fixture("quadratic");
    let o = run(&["--degree", "1", "inverse-repr", f.to_str().unwrap(), "--form", "spline"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["greville"], serde_json::json!(["0", "1/2", "1"]));
    assert_eq!(doc["splines"].as_array().unwrap().len(), 3);
}

#[test]
fn degenerate_curve_exits_non_general() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("line.json");
    fs::write(
        &f,
        r#"{"degree": 2, "knots": [0,0,0,1,1,1], "control_points": [[0,0],[1,1],[2,2]], "weights": [1,1,1]}"#,
    )
    .unwrap();
    let o = run(&["inverse-repr", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("segment on knot interval 2"));
}

#[test]
fn check_passes_on_every_fixture() {
    for name in ["quadratic", "cubic", "quartic", "quintic"] {
        let f = fixture(name);
        let o = run(&["check", f.to_str().unwrap()]);
        let out = stdout(&o);
        assert!(o.status.success(), "{name}: {out}");
        assert!(!out.contains("FAIL"));
        assert_eq!(out.contains("self-intersection detected"), name == "quintic");
    }
}

#[test]
fn negative_weight_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.json");
    fs::write(
        &f,
        r#"{"degree": 2, "knots": [0,0,0,1,1,1], "control_points": [[0,0],[1,2],[2,0]], "weights": [1,-1,1]}"#,
    )
    .unwrap();
    let o = run(&["check", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("weights[1]"));
}

fn read_columns(path: &std::path::Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect()
}

#[test]
fn plot_data_splines_partition_unity() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("quadratic");
    let o = run(&["--degree", "1", "plot-data", f.to_str().unwrap(), "--what", "splines", "--samples", "41", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let files: Vec<_> = (0..3).map(|k| read_columns(&dir.path().join(format!("spline_{k}.dat")))).collect();
    assert!(!dir.path().join("spline_3.dat").exists());
    for row in 0..41 {
        let sum: f64 = files.iter().map(|f| f[row][2]).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(files.iter().all(|f| (-1e-12..=1.0 + 1e-12).contains(&f[row][2])));
    }
}

#[test]
fn plot_data_curve_and_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture("cubic");
    let d = dir.path().to_str().unwrap();
    assert!(run(&["plot-data", f.to_str().unwrap(), "--what", "curve", "--samples", "2", "--out", d]).status.success());
    let rows = read_columns(&dir.path().join("curve.dat"));
    let c = fixtures::cubic().cast::<f64>();
    let (p0, pn) = (&c.control_points()[0], c.control_points().last().unwrap());
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0][1], rows[0][2]), (p0[0], p0[1]));
    assert_eq!((rows[1][1], rows[1][2]), (pn[0], pn[1]));

    assert!(run(&["plot-data", f.to_str().unwrap(), "--what", "inverse", "--samples", "100", "--out", d]).status.success());
    let rows = read_columns(&dir.path().join("inverse.dat"));
    assert_eq!(rows.len(), 100);
    assert!(rows.windows(2).all(|w| w[1][2] > w[0][2]));
}

#[test]
fn bench_reports_agreement() {
    let f = fixture("quadratic");
    let o = run(&["bench", f.to_str().unwrap(), "--points", "500"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let recs = doc["records"].as_array().unwrap();
    assert_eq!(recs.len(), 2);
    for r in recs {
        assert!(r["max_disagreement"].as_f64().unwrap() < 1e-7);
        assert!(r["mean_ns"].as_f64().unwrap() > 0.0);
        assert!(r["p99_ns"].is_number());
    }
    let o = run(&["bench", f.to_str().unwrap(), "--points", "0"]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(doc["records"].as_array().unwrap().is_empty());
}
