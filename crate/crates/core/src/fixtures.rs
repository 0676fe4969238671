//! The four example curves shipped in `fixtures/`.

use crate::bspline::NurbsCurve;
use crate::document::CurveDocument;
use crate::ratpoly::Rational;

pub const QUADRATIC: &str = include_str!("../fixtures/quadratic.json");
pub const CUBIC: &str = include_str!("../fixtures/cubic.json");
pub const QUARTIC: &str = include_str!("../fixtures/quartic.json");
pub const QUINTIC: &str = include_str!("../fixtures/quintic.json");

pub const DOCUMENTS: [(&str, &str); 4] = [
    ("quadratic", QUADRATIC),
    ("cubic", CUBIC),
    ("quartic", QUARTIC),
    ("quintic", QUINTIC),
];

fn load(text: &str) -> NurbsCurve<Rational> {
    CurveDocument::from_json(text)
        .and_then(|d| d.to_curve())
        .expect("bundled fixture is valid")
}

pub fn quadratic() -> NurbsCurve<Rational> {
    load(QUADRATIC)
}

pub fn cubic() -> NurbsCurve<Rational> {
    load(CUBIC)
}

pub fn quartic() -> NurbsCurve<Rational> {
    load(QUARTIC)
}

pub fn quintic() -> NurbsCurve<Rational> {
    load(QUINTIC)
}

pub fn all_exact() -> Vec<NurbsCurve<Rational>> {
    DOCUMENTS.iter().map(|(_, t)| load(t)).collect()
}

pub fn by_name(name: &str) -> Option<NurbsCurve<Rational>> {
    DOCUMENTS.iter().find(|(n, _)| *n == name).map(|(_, t)| load(t))
}
