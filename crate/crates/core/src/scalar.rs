//! Tagged scalar values: exact rationals with a floating fallback.
//!
//! Floating values carry a magnitude estimate alongside the value. The
//! magnitude bounds the size of the terms that were combined to produce the
//! value, so `eps * mag` approximates its absolute rounding error. Rank
//! decisions use it to tell a cancelled-to-noise entry from a genuine one.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic mode requested for an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    /// IEEE double; `mag >= |value|`.
    Float { value: f64, mag: f64 },
}

pub fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale through the bit lengths.
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n - d) as i32;
        let scaled = r / BigRational::from_integer(BigInt::from(2).pow(shift.unsigned_abs()));
        let base = scaled.to_f64().unwrap_or(f64::NAN);
        if shift >= 0 {
            base * 2f64.powi(shift)
        } else {
            base / 2f64.powi(-shift)
        }
    })
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Scalar::Exact(rational(numer, denom))
    }

    pub fn float(value: f64) -> Self {
        Scalar::Float {
            value,
            mag: value.abs(),
        }
    }

    /// A float whose rounding noise is judged against `mag` rather than
    /// its own size, e.g. a component of a unit vector.
    pub fn float_with_mag(value: f64, mag: f64) -> Self {
        Scalar::Float {
            value,
            mag: mag.max(value.abs()),
        }
    }

    /// Converts into the representation used by `mode`.
    pub fn in_mode(&self, mode: Mode) -> Self {
        match mode {
            Mode::Exact => self.clone(),
            Mode::Float => self.to_float(),
        }
    }

    pub fn to_float(&self) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::float(ratio_to_f64(r)),
            f => f.clone(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    /// Structural zero: exact zero, or a float that is exactly `0.0`.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float { value, .. } => *value == 0.0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => ratio_to_f64(r),
            Scalar::Float { value, .. } => *value,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float { .. } => None,
        }
    }

    /// Magnitude estimate; for exact values this is just `|value|`.
    pub fn mag(&self) -> f64 {
        match self {
            Scalar::Exact(r) => ratio_to_f64(r).abs(),
            Scalar::Float { mag, .. } => *mag,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float { value, mag } => Scalar::Float {
                value: value.abs(),
                mag: *mag,
            },
        }
    }

    fn float_parts(&self) -> (f64, f64) {
        match self {
            Scalar::Exact(r) => {
                let v = ratio_to_f64(r);
                (v, v.abs())
            }
            Scalar::Float { value, mag } => (*value, *mag),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                if b.is_zero() {
                    Err(Error::Domain("division by zero".into()))
                } else {
                    Ok(Scalar::Exact(a / b))
                }
            }
            _ => {
                let (a, ma) = self.float_parts();
                let (b, mb) = other.float_parts();
                if b == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                let value = a / b;
                Ok(Scalar::Float {
                    value,
                    mag: (ma / b.abs() + a.abs() * mb / (b * b)).max(value.abs()),
                })
            }
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one().checked_div(self)
    }

    pub fn powi(&self, k: i32) -> Result<Scalar> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        match self {
            Scalar::Exact(r) => Ok(Scalar::Exact(num_traits::pow(r.clone(), k as usize))),
            Scalar::Float { value, mag } => {
                let v = value.powi(k);
                Ok(Scalar::Float {
                    value: v,
                    mag: mag.powi(k).max(v.abs()),
                })
            }
        }
    }

    pub fn sqrt(&self) -> Result<Scalar> {
        if let Scalar::Exact(r) = self {
            if r.is_negative() {
                return Err(Error::Domain("sqrt of a negative value".into()));
            }
            if let Some(root) = exact_sqrt(r) {
                return Ok(Scalar::Exact(root));
            }
        }
        let (v, m) = self.float_parts();
        if v < 0.0 {
            return Err(Error::Domain("sqrt of a negative value".into()));
        }
        let s = v.sqrt();
        let mag = if s > 0.0 { s.max(m / (2.0 * s)) } else { m.sqrt() };
        Ok(Scalar::Float { value: s, mag })
    }

    pub fn ln(&self) -> Result<Scalar> {
        if let Scalar::Exact(r) = self {
            if !r.is_positive() {
                return Err(Error::Domain("log of a nonpositive value".into()));
            }
            if r.is_one() {
                return Ok(Scalar::zero());
            }
        }
        let (v, m) = self.float_parts();
        if v <= 0.0 {
            return Err(Error::Domain("log of a nonpositive value".into()));
        }
        let l = v.ln();
        Ok(Scalar::Float {
            value: l,
            mag: l.abs().max(m / v),
        })
    }

    pub fn exp(&self) -> Scalar {
        if self.as_exact().is_some_and(Zero::is_zero) {
            return Scalar::one();
        }
        let (v, m) = self.float_parts();
        let e = v.exp();
        Scalar::Float {
            value: e,
            mag: e * m.max(1.0),
        }
    }

    pub fn sin(&self) -> Scalar {
        if self.as_exact().is_some_and(Zero::is_zero) {
            return Scalar::zero();
        }
        let (v, m) = self.float_parts();
        let s = v.sin();
        Scalar::Float {
            value: s,
            mag: s.abs().max(m.min(1.0)),
        }
    }

    pub fn cos(&self) -> Scalar {
        if self.as_exact().is_some_and(Zero::is_zero) {
            return Scalar::one();
        }
        let (v, m) = self.float_parts();
        let c = v.cos();
        Scalar::Float {
            value: c,
            mag: c.abs().max(m.min(1.0)),
        }
    }

    /// Sign with respect to a noise threshold: values whose magnitude is
    /// within `tol * scale` of zero are reported as zero.
    pub fn sign_with_tol(&self, tol: f64, scale: f64) -> Ordering {
        match self {
            Scalar::Exact(r) => r.cmp(&BigRational::zero()),
            Scalar::Float { value, .. } => {
                if value.abs() <= tol * scale {
                    Ordering::Equal
                } else if *value > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float { value, .. } => write!(f, "{value:e}"),
        }
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::int(v)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $exact:expr, $float:expr) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact($exact(a, b)),
                    _ => {
                        let (a, ma) = self.float_parts();
                        let (b, mb) = rhs.float_parts();
                        let (value, mag): (f64, f64) = $float(a, ma, b, mb);
                        Scalar::Float {
                            value,
                            mag: mag.max(value.abs()),
                        }
                    }
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(
    Add,
    add,
    |a: &BigRational, b: &BigRational| a + b,
    |a: f64, ma: f64, b: f64, mb: f64| (a + b, ma + mb)
);
binop!(
    Sub,
    sub,
    |a: &BigRational, b: &BigRational| a - b,
    |a: f64, ma: f64, b: f64, mb: f64| (a - b, ma + mb)
);
binop!(
    Mul,
    mul,
    |a: &BigRational, b: &BigRational| a * b,
    |a: f64, ma: f64, b: f64, mb: f64| (a * b, ma * mb)
);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float { value, mag } => Scalar::Float {
                value: -value,
                mag: *mag,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact() {
        let a = Scalar::ratio(1, 2);
        let b = Scalar::ratio(1, 3);
        assert_eq!(&a + &b, Scalar::ratio(5, 6));
        assert_eq!(&a * &b, Scalar::ratio(1, 6));
        assert_eq!(a.checked_div(&b).unwrap(), Scalar::ratio(3, 2));
        assert_eq!(a.powi(-2).unwrap(), Scalar::int(4));
    }

    #[test]
    fn irrational_primitives_fall_back_to_float() {
        assert_eq!(Scalar::zero().sin(), Scalar::zero());
        assert_eq!(Scalar::zero().cos(), Scalar::one());
        assert!(!Scalar::ratio(1, 2).sin().is_exact());
        assert_eq!(Scalar::ratio(9, 4).sqrt().unwrap(), Scalar::ratio(3, 2));
        assert!(!Scalar::int(2).sqrt().unwrap().is_exact());
        assert_eq!(Scalar::one().ln().unwrap(), Scalar::zero());
    }

    #[test]
    fn domain_errors() {
        assert!(Scalar::one().checked_div(&Scalar::zero()).is_err());
        assert!(Scalar::int(-1).sqrt().is_err());
        assert!(Scalar::zero().ln().is_err());
        assert!(Scalar::float(-0.5).ln().is_err());
    }

    #[test]
    fn cancellation_keeps_magnitude() {
        let a = Scalar::float(1.0 + 1e-15);
        let d = &a - &Scalar::float(1.0);
        assert!(d.to_f64().abs() < 1e-14);
        assert!(d.mag() >= 2.0);
    }
}
