//! Exact rational helpers shared by every polytope-facing module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Relative tolerance used when turning Born-rule values into rationals.
pub const RATIONALIZE_TOL: f64 = 1e-12;

/// Denominator cap for continued-fraction rationalisation.
pub const RATIONALIZE_MAX_DEN: i128 = 1_000_000;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num
        .trim()
        .parse()
        .map_err(|_| format!("bad rational numerator in {s:?}"))?;
    let den: BigInt = den
        .trim()
        .parse()
        .map_err(|_| format!("bad rational denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rational::new(num, den))
}

pub(crate) fn parse_rational_at(line: usize, s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|m| Error::parse(line, m))
}

/// Formats as `num/den`, dropping the denominator when it is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` by continued fractions, stopping at
/// the first convergent within `tol` of `x` or before the denominator
/// exceeds `max_den`.
pub fn rationalize(x: f64, tol: f64, max_den: i128) -> Rational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let negative = x < 0.0;
    let target = x.abs();
    let (mut h_prev, mut h) = (1i128, target.floor() as i128);
    let (mut k_prev, mut k) = (0i128, 1i128);
    let mut frac = target - target.floor();
    while frac > 0.0 && ((h as f64 / k as f64) - target).abs() > tol {
        let inv = 1.0 / frac;
        let a = inv.floor();
        if !a.is_finite() || a > max_den as f64 {
            break;
        }
        let a = a as i128;
        let k_next = a * k + k_prev;
        if k_next > max_den {
            break;
        }
        let h_next = a * h + h_prev;
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
        frac = inv - inv.floor();
    }
    let r = Rational::new(BigInt::from(h), BigInt::from(k));
    if negative {
        -r
    } else {
        r
    }
}

pub(crate) fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Scales a rational vector by a positive factor so that it becomes a
/// primitive integer vector (entries coprime). The zero vector maps to
/// zeros.
pub fn primitive_integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = lcm_of_denominators(row);
    let ints: Vec<BigInt> = row
        .iter()
        .map(|v| v.numer() * (&lcm / v.denom()))
        .collect();
    primitive(ints)
}

pub(crate) fn primitive(mut ints: Vec<BigInt>) -> Vec<BigInt> {
    let g = ints.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in ints.iter_mut() {
            *v = &*v / &g;
        }
    }
    ints
}
