use super::LeviCivita;
use crate::error::Result;
use crate::expr::{eval, parse_with_vars, Backend, NamedConst};
use crate::numeric::{Elementary, Rational, Scalar};

/// Evaluates expressions over truncated Levi-Civita series.
#[derive(Clone, Debug)]
pub struct LcBackend {
    pub trunc: Rational,
    pub precision: u32,
}

impl Backend for LcBackend {
    type Value = LeviCivita;

    fn constant(&self, c: &Rational) -> Result<LeviCivita> {
        Ok(LeviCivita::constant(Scalar::Exact(c.clone()), self.trunc.clone()))
    }

    fn named(&self, c: NamedConst) -> Result<LeviCivita> {
        Ok(LeviCivita::constant(
            Scalar::approx(c.value(), self.precision)?,
            self.trunc.clone(),
        ))
    }

    fn add(&self, a: &LeviCivita, b: &LeviCivita) -> Result<LeviCivita> {
        a.add(b)
    }

    fn sub(&self, a: &LeviCivita, b: &LeviCivita) -> Result<LeviCivita> {
        a.sub(b)
    }

    fn mul(&self, a: &LeviCivita, b: &LeviCivita) -> Result<LeviCivita> {
        a.mul(b)
    }

    fn div(&self, a: &LeviCivita, b: &LeviCivita) -> Result<LeviCivita> {
        a.div(b)
    }

    fn neg(&self, a: &LeviCivita) -> Result<LeviCivita> {
        Ok(a.neg())
    }

    fn pow_rational(&self, base: &LeviCivita, p: &Rational) -> Result<LeviCivita> {
        base.pow_rational(p, self.precision)
    }

    fn pow(&self, base: &LeviCivita, exponent: &LeviCivita) -> Result<LeviCivita> {
        let log = base.apply(Elementary::Log, self.precision)?;
        exponent.mul(&log)?.apply(Elementary::Exp, self.precision)
    }

    fn call(&self, f: Elementary, a: &LeviCivita) -> Result<LeviCivita> {
        a.apply(f, self.precision)
    }
}

/// Parses a series written as an expression in `eps`, e.g. `3 + 5*eps - eps^2`.
pub fn parse_lc(text: &str, trunc: &Rational, precision: u32) -> Result<LeviCivita> {
    let e = parse_with_vars(text, &["eps"])?;
    let backend = LcBackend {
        trunc: trunc.clone(),
        precision,
    };
    eval(&e, &backend, &[("eps", LeviCivita::eps(trunc.clone()))])
}
