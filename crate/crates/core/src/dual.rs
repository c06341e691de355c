//! Dual numbers `a + bδ` with `δ² = 0`, used as a forward-mode
//! differentiation engine.
//!
//! The operations below evaluate their scalar steps in the same order as
//! the first two coefficients of the series backend, so a derivative
//! computed either way comes out identical, not just close.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{eval_at, Backend, Expr, NamedConst};
use crate::numeric::{Elementary, Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct DualNumber {
    pub real: Scalar,
    pub slope: Scalar,
}

impl DualNumber {
    pub fn new(real: Scalar, slope: Scalar) -> Self {
        DualNumber { real, slope }
    }

    pub fn constant(real: Scalar) -> Self {
        DualNumber::new(real, Scalar::zero())
    }

    /// `x + δ`, the seed for differentiating in `x`.
    pub fn variable(x: Scalar) -> Self {
        DualNumber::new(x, Scalar::one())
    }

    pub fn add(&self, other: &DualNumber) -> Result<DualNumber> {
        Ok(DualNumber::new(
            self.real.add(&other.real)?,
            self.slope.add(&other.slope)?,
        ))
    }

    pub fn sub(&self, other: &DualNumber) -> Result<DualNumber> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> DualNumber {
        DualNumber::new(self.real.neg(), self.slope.neg())
    }

    pub fn mul(&self, other: &DualNumber) -> Result<DualNumber> {
        let slope = self
            .real
            .mul(&other.slope)?
            .add(&self.slope.mul(&other.real)?)?;
        Ok(DualNumber::new(self.real.mul(&other.real)?, slope))
    }

    /// `1/(c + dδ) = 1/c - (d/c)/c δ`; zero divisors have no inverse.
    pub fn invert(&self) -> Result<DualNumber> {
        if self.real.is_zero() {
            return Err(Error::domain(
                "div",
                format!("{self} is a zero divisor"),
            ));
        }
        let inv = self.real.recip()?;
        let u = self.slope.mul(&inv)?;
        Ok(DualNumber::new(inv.clone(), inv.mul(&u.neg())?))
    }

    pub fn div(&self, other: &DualNumber) -> Result<DualNumber> {
        self.mul(&other.invert()?)
    }

    pub fn pow_rational(&self, p: &Rational, precision: u32) -> Result<DualNumber> {
        if p.is_zero() {
            return Ok(DualNumber::constant(Scalar::one()));
        }
        let real = self.real.pow_rational(p, precision)?;
        if self.real.is_zero() {
            // x^p at 0: only integer powers p >= 1 are differentiable
            let slope = match p.to_i64() {
                Some(1) => self.slope.clone(),
                Some(k) if k > 1 => Scalar::zero(),
                _ if self.slope.is_zero() => Scalar::zero(),
                _ => {
                    return Err(Error::domain(
                        "pow",
                        format!("x^{p} has no finite slope at 0"),
                    ))
                }
            };
            return Ok(DualNumber::new(real, slope));
        }
        let u = self.slope.mul(&self.real.recip()?)?;
        let slope = real.mul(&Scalar::Exact(p.clone()).mul(&u)?)?;
        Ok(DualNumber::new(real, slope))
    }

    pub fn apply(&self, f: Elementary, precision: u32) -> Result<DualNumber> {
        let (a, b) = (&self.real, &self.slope);
        match f {
            Elementary::Exp => {
                let e = a.apply(Elementary::Exp, precision)?;
                let slope = e.mul(b)?;
                Ok(DualNumber::new(e, slope))
            }
            Elementary::Sin => {
                let slope = a.apply(Elementary::Cos, precision)?.mul(b)?;
                Ok(DualNumber::new(a.apply(Elementary::Sin, precision)?, slope))
            }
            Elementary::Cos => {
                let slope = a.apply(Elementary::Sin, precision)?.mul(b)?.neg();
                Ok(DualNumber::new(a.apply(Elementary::Cos, precision)?, slope))
            }
            Elementary::Log => {
                if a.signum() <= 0 {
                    return Err(Error::domain("log", format!("argument {a}")));
                }
                let slope = a.recip()?.mul(b)?;
                Ok(DualNumber::new(a.apply(Elementary::Log, precision)?, slope))
            }
            Elementary::Sqrt => {
                if a.signum() < 0 {
                    return Err(Error::domain("sqrt", format!("argument {a}")));
                }
                self.pow_rational(&Rational::frac(1, 2), precision)
            }
            Elementary::Abs => match a.signum() {
                1 => Ok(self.clone()),
                -1 => Ok(self.neg()),
                _ if b.is_zero() => Ok(self.clone()),
                _ => Err(Error::NonDifferentiable {
                    at: a.to_string(),
                    reason: "abs has a corner at 0".into(),
                }),
            },
        }
    }
}

impl fmt::Display for DualNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*d", self.real, self.slope)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DualBackend {
    pub precision: u32,
}

impl Backend for DualBackend {
    type Value = DualNumber;

    fn constant(&self, c: &Rational) -> Result<DualNumber> {
        Ok(DualNumber::constant(Scalar::Exact(c.clone())))
    }

    fn named(&self, c: NamedConst) -> Result<DualNumber> {
        Ok(DualNumber::constant(Scalar::approx(c.value(), self.precision)?))
    }

    fn add(&self, a: &DualNumber, b: &DualNumber) -> Result<DualNumber> {
        a.add(b)
    }

    fn sub(&self, a: &DualNumber, b: &DualNumber) -> Result<DualNumber> {
        a.sub(b)
    }

    fn mul(&self, a: &DualNumber, b: &DualNumber) -> Result<DualNumber> {
        a.mul(b)
    }

    fn div(&self, a: &DualNumber, b: &DualNumber) -> Result<DualNumber> {
        a.div(b)
    }

    fn neg(&self, a: &DualNumber) -> Result<DualNumber> {
        Ok(a.neg())
    }

    fn pow_rational(&self, base: &DualNumber, p: &Rational) -> Result<DualNumber> {
        base.pow_rational(p, self.precision)
    }

    fn pow(&self, base: &DualNumber, exponent: &DualNumber) -> Result<DualNumber> {
        let log = base.apply(Elementary::Log, self.precision)?;
        exponent.mul(&log)?.apply(Elementary::Exp, self.precision)
    }

    fn call(&self, f: Elementary, a: &DualNumber) -> Result<DualNumber> {
        a.apply(f, self.precision)
    }
}

/// Slope of `e` at `x0`, read off `e(x0 + δ)`.
pub fn derivative_dual(e: &Expr, x0: &Scalar, precision: u32) -> Result<Scalar> {
    let backend = DualBackend { precision };
    Ok(eval_at(e, &backend, DualNumber::variable(x0.clone()))?.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::Exact(Rational::frac(n, d))
    }

    fn d(a: Scalar, b: Scalar) -> DualNumber {
        DualNumber::new(a, b)
    }

    #[test]
    fn square_and_nilpotency() {
        let x = d(q(3, 1), q(2, 1));
        assert_eq!(x.mul(&x).unwrap(), d(q(9, 1), q(12, 1)));
        let delta = d(Scalar::zero(), Scalar::one());
        assert_eq!(delta.mul(&delta).unwrap(), d(Scalar::zero(), Scalar::zero()));
    }

    #[test]
    fn division() {
        let num = d(q(1, 1), q(1, 1));
        let den = d(q(1, 1), q(-1, 1));
        let quot = num.div(&den).unwrap();
        assert_eq!(quot, d(q(1, 1), q(2, 1)));
        // multiplying back recovers the numerator
        assert_eq!(quot.mul(&den).unwrap(), num);
        let zero_divisor = d(Scalar::zero(), Scalar::one());
        assert!(matches!(num.div(&zero_divisor), Err(Error::Domain { .. })));
    }

    #[test]
    fn elementary_table() {
        let delta = d(Scalar::zero(), Scalar::one());
        assert_eq!(delta.apply(Elementary::Exp, 15).unwrap(), d(Scalar::one(), Scalar::one()));
        assert_eq!(delta.apply(Elementary::Sin, 15).unwrap(), d(Scalar::zero(), Scalar::one()));
        let one_plus = d(Scalar::one(), Scalar::one());
        assert_eq!(one_plus.apply(Elementary::Log, 15).unwrap(), d(Scalar::zero(), Scalar::one()));
        assert!(matches!(
            d(q(-1, 1), Scalar::one()).apply(Elementary::Log, 15),
            Err(Error::Domain { .. })
        ));
        assert_eq!(
            d(q(4, 1), Scalar::one()).apply(Elementary::Sqrt, 15).unwrap(),
            d(q(2, 1), q(1, 4))
        );
    }

    #[test]
    fn derivatives() {
        let e = parse("x^2").unwrap();
        assert_eq!(derivative_dual(&e, &q(3, 1), 15).unwrap(), q(6, 1));
        let e = parse("exp(x)").unwrap();
        let slope = derivative_dual(&e, &q(1, 1), 15).unwrap();
        assert!((slope.to_f64() - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn matches_central_difference() {
        let e = parse("sin(x)*exp(x)").unwrap();
        let f = |x: f64| x.sin() * x.exp();
        let h = 1e-6;
        let fd = (f(0.5 + h) - f(0.5 - h)) / (2.0 * h);
        let ad = derivative_dual(&e, &q(1, 2), 15).unwrap().to_f64();
        assert!(((ad - fd) / fd).abs() < 1e-5);
    }

    #[test]
    fn abs_corner() {
        let e = parse("abs(x)").unwrap();
        assert!(matches!(
            derivative_dual(&e, &Scalar::zero(), 15),
            Err(Error::NonDifferentiable { .. })
        ));
        assert_eq!(derivative_dual(&e, &q(-2, 1), 15).unwrap(), q(-1, 1));
    }

    fn dual() -> impl Strategy<Value = DualNumber> {
        (-20i64..20, 1i64..6, -20i64..20, 1i64..6).prop_map(|(a, b, c, e)| d(q(a, b), q(c, e)))
    }

    proptest! {
        #[test]
        fn ring_laws(x in dual(), y in dual(), z in dual()) {
            prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
            prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
            prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
            prop_assert_eq!(
                x.mul(&y.add(&z).unwrap()).unwrap(),
                x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
            );
        }

        #[test]
        fn slope_only_factors_annihilate(b in -20i64..20, c in -20i64..20, x in dual()) {
            let u = d(Scalar::zero(), q(b, 1));
            let v = d(Scalar::zero(), q(c, 1));
            let prod = u.mul(&x).unwrap().mul(&v).unwrap();
            prop_assert!(prod.real.is_zero() && prod.slope.is_zero());
        }
    }
}
