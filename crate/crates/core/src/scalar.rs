//! Number types for right-hand sides: exact rationals, or double-double
//! floats (about 106 bits of mantissa) when products run over many primes.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use twofloat::TwoFloat;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            _ => Err(Error::Parse(format!("mode must be exact or float, got {s:?}"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

/// Arithmetic shared by both modes.
pub trait Scalar:
    Clone
    + Send
    + Sync
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_rational(r: &BigRational) -> Self;
    fn to_twofloat(&self) -> TwoFloat;
    fn into_value(self) -> Value;

    fn from_u128(n: u128) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(n)))
    }

    fn ratio(num: u128, den: u128) -> Self {
        Self::from_u128(num) / Self::from_u128(den)
    }

    fn approx_f64(&self) -> f64 {
        self.to_twofloat().hi()
    }

    /// Product of many factors.
    fn product(items: Vec<Self>) -> Self {
        items
            .into_iter()
            .fold(Self::from_u128(1), |acc, x| acc * x)
    }
}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    /// Numerators and denominators are multiplied by product trees and the
    /// fraction is reduced once; reducing after every factor is quadratic.
    fn product(items: Vec<Self>) -> Self {
        let (nums, dens): (Vec<BigInt>, Vec<BigInt>) =
            items.into_iter().map(|r| r.into()).unzip();
        BigRational::new(tree_product(nums), tree_product(dens))
    }
    fn to_twofloat(&self) -> TwoFloat {
        rational_to_twofloat(self)
    }
    fn into_value(self) -> Value {
        Value::Exact(self)
    }
}

impl Scalar for TwoFloat {
    fn from_rational(r: &BigRational) -> Self {
        rational_to_twofloat(r)
    }
    fn to_twofloat(&self) -> TwoFloat {
        *self
    }
    fn from_u128(n: u128) -> Self {
        TwoFloat::from(n)
    }
    fn ratio(num: u128, den: u128) -> Self {
        div(TwoFloat::from(num), TwoFloat::from(den))
    }
    fn into_value(self) -> Value {
        Value::Float(self)
    }
}

/// Double-double quotient by long division. The `/` operator of the
/// `twofloat` crate loses the low word (it forms `1 − b·(1/b)` without a
/// fused multiply-add), leaving about 1e-17 relative error.
pub fn div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

fn tree_product(mut v: Vec<BigInt>) -> BigInt {
    if v.is_empty() {
        return BigInt::from(1);
    }
    while v.len() > 1 {
        v = v
            .chunks(2)
            .map(|c| match c {
                [a, b] => a * b,
                [a] => a.clone(),
                _ => unreachable!(),
            })
            .collect();
    }
    v.pop().unwrap()
}

/// Nearest double-double: the f64 value plus the f64 value of the residual.
pub fn rational_to_twofloat(r: &BigRational) -> TwoFloat {
    let hi = r.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() || hi == 0.0 {
        return TwoFloat::from(hi);
    }
    let Some(h) = BigRational::from_float(hi) else {
        return TwoFloat::from(hi);
    };
    let lo = (r - h).to_f64().unwrap_or(0.0);
    TwoFloat::new_add(hi, lo)
}

/// A result in either mode.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub enum Value {
    Exact(BigRational),
    Float(TwoFloat),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(t) => t.hi() + t.lo(),
        }
    }

    pub fn to_twofloat(&self) -> TwoFloat {
        match self {
            Value::Exact(r) => rational_to_twofloat(r),
            Value::Float(t) => *t,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Value::Exact(_) => Mode::Exact,
            Value::Float(_) => Mode::Float,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }

    /// Exact rationals as `n/d`; floats rounded to 12 significant digits.
    pub fn render(&self) -> String {
        match self {
            Value::Exact(r) => r.to_string(),
            Value::Float(_) => render_f64(self.to_f64()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// 12 significant digits; positional for magnitudes in `[1e-5, 1e15)`,
/// scientific otherwise.
pub fn render_f64(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return x.to_string();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        format!("{x:.*}", (11 - e).max(0) as usize)
    } else {
        format!("{x:.11e}")
    }
}

/// `x` rounded to 12 significant digits, so that rendering and parsing
/// round-trip exactly.
pub fn round12(x: f64) -> f64 {
    render_f64(x).parse().unwrap_or(x)
}

/// Parses `n/d`, `n`, or a decimal.
pub fn parse_value(s: &str) -> Result<Value> {
    let s = s.trim();
    let looks_rational = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-');
    if looks_rational {
        if let Ok(r) = s.parse::<BigRational>() {
            return Ok(Value::Exact(r));
        }
    }
    s.parse::<f64>()
        .map(|x| Value::Float(TwoFloat::from(x)))
        .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_conversion_keeps_extra_bits() {
        let third = BigRational::new(1.into(), 3.into());
        let t = rational_to_twofloat(&third);
        let back = t * TwoFloat::from(3.0) - TwoFloat::from(1.0);
        assert!(back.hi().abs() < 1e-30, "{back:?}");
    }

    #[test]
    fn division_keeps_low_word() {
        for (n, d) in [(1u128, 3u128), (2, 7), (10, 21), (999_983, 1_000_003)] {
            let q = <TwoFloat as Scalar>::ratio(n, d);
            let back = q * TwoFloat::from(d) - TwoFloat::from(n);
            assert!((back.hi() / n as f64).abs() < 1e-30, "{n}/{d}: {back:?}");
        }
        let a = rational_to_twofloat(&BigRational::new(22.into(), 7.into()));
        let q = div(a, TwoFloat::from(3.0).sqrt());
        let back = q * TwoFloat::from(3.0).sqrt() - a;
        assert!(back.hi().abs() < 1e-29, "{back:?}");
    }

    #[test]
    fn products_agree() {
        let items: Vec<BigRational> = (2..200u32)
            .map(|p| BigRational::new((p - 1).into(), p.into()))
            .collect();
        let tree = <BigRational as Scalar>::product(items.clone());
        let seq = items.iter().fold(BigRational::from_integer(1.into()), |a, b| a * b);
        assert_eq!(tree, seq);
        assert_eq!(tree, BigRational::new(1.into(), 199.into()));
    }

    #[test]
    fn render_round_trip() {
        for x in [1.0, 1.0 / 3.0, 123456.789, 6.02e23, 1e-7] {
            let r = round12(x);
            assert_eq!(render_f64(r).parse::<f64>().unwrap(), r);
            assert_eq!(render_f64(round12(r)), render_f64(r));
        }
        let v = parse_value("35/18").unwrap();
        assert_eq!(v.render(), "35/18");
        assert!(matches!(parse_value("1.5e3").unwrap(), Value::Float(_)));
    }
}
