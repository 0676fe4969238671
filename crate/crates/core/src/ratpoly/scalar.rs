//! Number backends.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Two backends are
//! provided: [`Rational`] (arbitrary precision, always reduced, positive
//! denominator) and `f64`. Because the backend is a type parameter, mixing
//! the two in one computation does not compile; conversion is explicit via
//! [`Scalar::cast`].

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float,
}

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const BACKEND: Backend;

    fn from_rational(r: &Rational) -> Self;
    fn to_rational(&self) -> Rational;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Whether `self` should be treated as zero, given the magnitude `scale`
    /// of the quantities it was computed from. Exact zero for rationals.
    fn is_negligible(&self, scale: f64) -> bool;

    /// Square root when it is representable: exact perfect squares for
    /// rationals, `f64::sqrt` for floats. `None` for negative values.
    fn sqrt_exact(&self) -> Option<Self>;

    fn from_int(v: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(v)))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    fn cast<T: Scalar>(&self) -> T {
        match T::BACKEND {
            Backend::Exact => T::from_rational(&self.to_rational()),
            Backend::Float => T::from_f64(self.to_f64()),
        }
    }

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Exact;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).expect("non-finite float cannot become a rational")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let root = |n: &BigInt| {
            let r = n.sqrt();
            (&r * &r == *n).then_some(r)
        };
        Some(Rational::new(root(self.numer())?, root(self.denom())?))
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).expect("non-finite float cannot become a rational")
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE)
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

/// Parses `"p/q"`, integers, and terminating decimals (with optional
/// exponent) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse(text.to_string()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(Error::Parse(text.to_string()));
        }
        return Ok(n / d);
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::Parse(text.to_string()))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(text.to_string()));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(text.to_string()));
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str_radix(if all_digits.is_empty() { "0" } else { &all_digits }, 10)
        .map_err(|_| Error::Parse(text.to_string()))?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
