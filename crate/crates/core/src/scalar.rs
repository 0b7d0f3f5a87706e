//! Scalar fields used by every computation in the crate.
//!
//! Identities are checked over [`Rational`] (arbitrary precision, exact);
//! `f64` is available for large enumerations where throughput matters more
//! than exactness. Both implement [`Scalar`], so every routine is written once.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{Num, One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Default relative tolerance for floating arithmetic.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Log-domain gap below which [`Scalar::cmp_power`] falls back to exact integer powers.
const LOG_TIE_GAP: f64 = 1e-9;

/// Largest exponent denominator for which exact power comparison is attempted.
const MAX_EXACT_ROOT: u64 = 4096;

pub trait Scalar: Clone + fmt::Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_f64(v: f64) -> Option<Self>;
    fn from_rational(r: &Rational) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn to_f64(&self) -> f64;

    /// Zero test: exact for rationals, `|x| <= rel_tol * max(scale, 1)` for floats.
    fn is_negligible(&self, scale: f64, rel_tol: f64) -> bool;

    /// Compares `self` against `base^exp` for nonnegative `exp`.
    fn cmp_power(&self, base: u64, exp: &Exponent) -> Ordering;

    fn parse(s: &str) -> Result<Self>;
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Result<Self>;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Option<Self> {
        Rational::from_float(v)
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_bigint(v: &BigInt) -> Self {
        Rational::from_integer(v.clone())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_negligible(&self, _scale: f64, _rel_tol: f64) -> bool {
        self.is_zero()
    }

    fn cmp_power(&self, base: u64, exp: &Exponent) -> Ordering {
        if exp.is_zero() || base == 1 {
            return self.cmp(&Rational::one());
        }
        if base == 0 {
            return self.cmp(&Rational::zero());
        }
        if !self.is_positive() {
            return Ordering::Less;
        }
        let lx = Scalar::to_f64(self).ln();
        let ls = exp.value() * (base as f64).ln();
        if lx.is_finite() && ((lx - ls).abs() > LOG_TIE_GAP || exp.den > MAX_EXACT_ROOT) {
            return lx.partial_cmp(&ls).unwrap_or(Ordering::Equal);
        }
        // x = a/b against base^(p/q):  a^q  vs  base^p * b^q
        let q = exp.den as u32;
        let p = exp.num as u32;
        let lhs: BigInt = Pow::pow(self.numer().clone(), q);
        let rhs: BigInt = Pow::pow(BigInt::from(base), p) * Pow::pow(self.denom().clone(), q);
        lhs.cmp(&rhs)
    }

    fn parse(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(Error::parse(&other.to_string(), "expected a rational")),
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Option<Self> {
        v.is_finite().then_some(v)
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_bigint(v: &BigInt) -> Self {
        ToPrimitive::to_f64(v).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_negligible(&self, scale: f64, rel_tol: f64) -> bool {
        self.abs() <= rel_tol * scale.abs().max(1.0)
    }

    fn cmp_power(&self, base: u64, exp: &Exponent) -> Ordering {
        let rhs = (base as f64).powf(exp.value());
        self.partial_cmp(&rhs).unwrap_or(Ordering::Equal)
    }

    fn parse(s: &str) -> Result<Self> {
        if s.contains('/') {
            return Ok(Scalar::to_f64(&parse_rational(s)?));
        }
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::parse(s, e.to_string()))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::parse(&n.to_string(), "not representable as f64")),
            serde_json::Value::String(s) => <f64 as Scalar>::parse(s),
            other => Err(Error::parse(&other.to_string(), "expected a number")),
        }
    }
}

/// Parses `"p/q"`, integers, and decimals with optional exponent (`"-1.25e-3"`) exactly.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::parse(input, "empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim()).map_err(|_| Error::parse(input, "bad numerator"))?;
        let den = parse_decimal(den.trim()).map_err(|_| Error::parse(input, "bad denominator"))?;
        if den.is_zero() {
            return Err(Error::parse(input, "zero denominator"));
        }
        return Ok(num / den);
    }
    parse_decimal(s).map_err(|reason| Error::parse(input, reason))
}

fn parse_decimal(s: &str) -> std::result::Result<Rational, String> {
    if s.is_empty() {
        return Err("empty".into());
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| "bad exponent".to_string())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err("no digits".into());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err("invalid digit".into());
    }
    let all = format!("{int_part}{frac_part}");
    let value = BigInt::parse_bytes(all.as_bytes(), 10).ok_or("invalid digits")?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = Rational::from_integer(value);
    if scale >= 0 {
        r *= Rational::from_integer(Pow::pow(ten, scale as u32));
    } else {
        r /= Rational::from_integer(Pow::pow(ten, (-scale) as u32));
    }
    Ok(if negative { -r } else { r })
}

/// `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nonnegative rational exponent `num/den`, used for thresholds like `(|j| + |j'|)^δ`.
///
/// Keeping the exponent rational lets threshold comparisons be decided exactly
/// when the floating estimate is too close to call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Exponent {
    num: u64,
    den: u64,
}

impl Exponent {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("exponent with zero denominator".into()));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    /// Uses the shortest decimal representation of `v`, so `0.1` becomes exactly `1/10`.
    pub fn from_f64(v: f64) -> Result<Self> {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter(format!("exponent {v} must be finite and >= 0")));
        }
        Self::from_rational(&parse_rational(&format!("{v}"))?)
    }

    pub fn from_rational(r: &Rational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::InvalidParameter("negative exponent".into()));
        }
        let num = r.numer().to_u64();
        let den = r.denom().to_u64();
        match (num, den) {
            (Some(n), Some(d)) => Self::new(n, d),
            _ => Err(Error::InvalidParameter(format!("exponent {r} too large"))),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::from_rational(&parse_rational(s)?)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn as_rational(&self) -> Rational {
        Rational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    /// Largest integer `k >= 0` with `k <= base^self`.
    pub fn floor_power(&self, base: u64) -> u64 {
        let mut k = (base as f64).powf(self.value()).floor().max(0.0) as u64;
        let le = |k: u64| <Rational as Scalar>::from_i64(k as i64).cmp_power(base, self) != Ordering::Greater;
        while k > 0 && !le(k) {
            k -= 1;
        }
        while le(k + 1) {
            k += 1;
        }
        k
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl TryFrom<String> for Exponent {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Exponent::parse(&s)
    }
}

impl From<Exponent> for String {
    fn from(e: Exponent) -> String {
        e.to_string()
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(q("3/4"), Rational::new(3.into(), 4.into()));
        assert_eq!(q("-0.125"), Rational::new((-1).into(), 8.into()));
        assert_eq!(q("1.5e2"), Rational::from_integer(150.into()));
        assert_eq!(q("2.5e-1"), Rational::new(1.into(), 4.into()));
        assert_eq!(q(" 7 "), Rational::from_integer(7.into()));
    }

    #[test]
    fn rejects_malformed_rationals() {
        for bad in ["3/", "/4", "", "1/0", "abc", "1.2.3", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn exponent_from_decimal_is_exact() {
        let e = Exponent::from_f64(0.1).unwrap();
        assert_eq!((e.numer(), e.denom()), (1, 10));
        assert_eq!(Exponent::parse("2/4").unwrap(), Exponent::new(1, 2).unwrap());
        assert!(Exponent::from_f64(-0.5).is_err());
    }

    #[test]
    fn power_comparison_at_exact_ties() {
        let half = Exponent::new(1, 2).unwrap();
        // sqrt(4) = 2 exactly
        assert_eq!(<Rational as Scalar>::from_i64(2).cmp_power(4, &half), Ordering::Equal);
        assert_eq!(q("199/100").cmp_power(4, &half), Ordering::Less);
        assert_eq!(q("201/100").cmp_power(4, &half), Ordering::Greater);
        let tenth = Exponent::from_f64(0.1).unwrap();
        // 1 <= 1^0.1 and 1 < 2^0.1
        assert_eq!(Rational::one().cmp_power(1, &tenth), Ordering::Equal);
        assert_eq!(Rational::one().cmp_power(2, &tenth), Ordering::Less);
        assert_eq!(Rational::zero().cmp_power(0, &tenth), Ordering::Equal);
    }

    #[test]
    fn floor_power_matches_definition() {
        let tenth = Exponent::from_f64(0.1).unwrap();
        assert_eq!(tenth.floor_power(128), 1);
        assert_eq!(tenth.floor_power(1024), 2);
        assert_eq!(tenth.floor_power(1023), 1);
        assert_eq!(Exponent::new(1, 2).unwrap().floor_power(16), 4);
    }

    #[test]
    fn json_round_trip() {
        let r = q("-22/7");
        assert_eq!(<Rational as Scalar>::from_json(&r.to_json()).unwrap(), r);
        assert_eq!(<f64 as Scalar>::from_json(&2.5f64.to_json()).unwrap(), 2.5);
    }
}
