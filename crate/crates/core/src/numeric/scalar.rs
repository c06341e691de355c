use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

use super::approx::{Approx, Elementary};
use super::rational::Rational;

/// Coefficient domain shared by every backend.
///
/// Arithmetic stays exact while both operands are exact; mixing in an
/// [`Approx`] promotes the result to `Approx` with the smaller precision.
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Approx(Approx),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(Rational::from_integer(n))
    }

    pub fn approx(value: f64, precision: u32) -> Result<Self> {
        Approx::new(value, precision).map(Scalar::Approx)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx(a) => a.value() == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_one(),
            Scalar::Approx(a) => a.value() == 1.0,
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Exact(r) => r.signum(),
            Scalar::Approx(a) if a.value() > 0.0 => 1,
            Scalar::Approx(a) if a.value() < 0.0 => -1,
            Scalar::Approx(_) => 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Approx(a) => a.value(),
        }
    }

    /// Claimed precision in decimal digits; `None` for exact values.
    pub fn precision(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Approx(a) => Some(a.precision()),
        }
    }

    fn promote(&self, precision: u32) -> Result<Approx> {
        match self {
            Scalar::Exact(r) => Approx::new(r.to_f64(), precision),
            Scalar::Approx(a) => Ok(*a),
        }
    }

    fn both_approx(&self, other: &Scalar) -> Result<(Approx, Approx)> {
        let p = self
            .precision()
            .into_iter()
            .chain(other.precision())
            .min()
            .unwrap_or(super::DEFAULT_PRECISION);
        Ok((self.promote(p)?, other.promote(p)?))
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a + b)),
            _ => {
                let (a, b) = self.both_approx(other)?;
                a.add(b).map(Scalar::Approx)
            }
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a - b)),
            _ => {
                let (a, b) = self.both_approx(other)?;
                a.sub(b).map(Scalar::Approx)
            }
        }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a * b)),
            _ => {
                let (a, b) = self.both_approx(other)?;
                a.mul(b).map(Scalar::Approx)
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.checked_div(b).map(Scalar::Exact),
            _ => {
                let (a, b) = self.both_approx(other)?;
                a.div(b).map(Scalar::Approx)
            }
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(a) => Scalar::Approx(a.neg()),
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.signum() < 0 {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one().div(self)
    }

    /// `self^p`. Exact whenever the result is rational and not absurdly wide;
    /// otherwise promoted to `Approx` at `precision` digits.
    pub fn pow_rational(&self, p: &Rational, precision: u32) -> Result<Scalar> {
        if p.is_zero() {
            return Ok(Scalar::one());
        }
        if let Scalar::Exact(base) = self {
            if let Some(k) = p.to_i64() {
                match base.checked_pow(k) {
                    Ok(r) => return Ok(Scalar::Exact(r)),
                    Err(Error::NotRepresentable(_)) => {
                        let a = Approx::new(base.to_f64(), precision)?;
                        return pow_approx_int(a, k);
                    }
                    Err(e) => return Err(e),
                }
            }
            if base.is_zero() {
                return if p.is_positive() {
                    Ok(Scalar::zero())
                } else {
                    Err(Error::domain("pow", format!("0^{p}")))
                };
            }
            if base.is_negative() {
                return Err(Error::domain("pow", format!("({base})^{p}")));
            }
            if let Some(r) = base.exact_pow_rational(p) {
                return Ok(Scalar::Exact(r));
            }
        }
        let a = self.promote(precision)?;
        match p.to_i64() {
            Some(k) => pow_approx_int(a, k),
            None => a.powf(p.to_f64()).map(Scalar::Approx),
        }
    }

    /// General power `self^exponent`; non-rational exponents go through
    /// `exp(exponent * log(self))` and need a positive base.
    pub fn pow(&self, exponent: &Scalar, precision: u32) -> Result<Scalar> {
        if let Scalar::Exact(p) = exponent {
            return self.pow_rational(p, precision);
        }
        match self.signum() {
            1 => {
                let base = self.promote(precision)?;
                base.powf(exponent.to_f64()).map(Scalar::Approx)
            }
            0 if exponent.signum() > 0 => Ok(Scalar::zero()),
            _ => Err(Error::domain("pow", format!("({self})^({exponent})"))),
        }
    }

    /// Elementary function with exact results at the special points
    /// `sin 0`, `cos 0`, `exp 0`, `log 1`, perfect squares, and `abs`.
    pub fn apply(&self, f: Elementary, precision: u32) -> Result<Scalar> {
        if let Scalar::Exact(r) = self {
            match f {
                Elementary::Abs => return Ok(Scalar::Exact(r.abs())),
                Elementary::Sin if r.is_zero() => return Ok(Scalar::zero()),
                Elementary::Cos | Elementary::Exp if r.is_zero() => return Ok(Scalar::one()),
                Elementary::Log if r.is_one() => return Ok(Scalar::zero()),
                Elementary::Log if r.signum() <= 0 => {
                    return Err(Error::domain("log", format!("argument {r}")))
                }
                Elementary::Sqrt if r.is_negative() => {
                    return Err(Error::domain("sqrt", format!("argument {r}")))
                }
                Elementary::Sqrt => {
                    if let Some(root) = r.exact_root(2) {
                        return Ok(Scalar::Exact(root));
                    }
                }
                _ => {}
            }
        }
        self.promote(precision)?.apply(f).map(Scalar::Approx)
    }

    /// Ordering; exact when both sides are exact, by value otherwise.
    pub fn compare(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

fn pow_approx_int(a: Approx, k: i64) -> Result<Scalar> {
    let k32 = i32::try_from(k).map_err(|_| Error::not_representable("exponent too large"))?;
    if a.value() == 0.0 && k < 0 {
        return Err(Error::domain("pow", format!("0^{k}")));
    }
    Approx::new(a.value().powi(k32), a.precision())
        .map(Scalar::Approx)
        .map_err(|_| Error::domain("pow", format!("{}^{k} overflowed", a.value())))
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<Approx> for Scalar {
    fn from(a: Approx) -> Self {
        Scalar::Approx(a)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Approx(a) => write!(f, "{a}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Approx(a) => write!(f, "~{a}"),
        }
    }
}
