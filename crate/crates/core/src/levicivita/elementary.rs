use super::{LcClass, LeviCivita};
use crate::error::{Error, Result};
use crate::numeric::{Elementary, Rational};

fn sin_coef(k: u32) -> Option<Rational> {
    Some(if k % 2 == 1 {
        let r = Rational::factorial_recip(k);
        if (k / 2) % 2 == 0 {
            r
        } else {
            -r
        }
    } else {
        Rational::zero()
    })
}

fn cos_coef(k: u32) -> Option<Rational> {
    Some(if k % 2 == 0 {
        let r = Rational::factorial_recip(k);
        if (k / 2) % 2 == 0 {
            r
        } else {
            -r
        }
    } else {
        Rational::zero()
    })
}

impl LeviCivita {
    /// Applies an elementary function through its Taylor series at the
    /// standard part: `f(s + h) = Σ f^(k)(s) h^k / k!`.
    ///
    /// Arguments must be finite, except for `abs` and `sqrt` which only look
    /// at the leading term.
    pub fn apply(&self, f: Elementary, precision: u32) -> Result<LeviCivita> {
        match f {
            Elementary::Abs => return Ok(if self.signum() < 0 { self.neg() } else { self.clone() }),
            Elementary::Sqrt => {
                if self.signum() < 0 {
                    return Err(Error::domain("sqrt", format!("negative argument {self}")));
                }
                return self.pow_rational(&Rational::frac(1, 2), precision);
            }
            _ => {}
        }
        if self.class() == LcClass::Infinite {
            return Err(Error::not_representable(format!(
                "{f} at the infinite element {self} has no series form"
            )));
        }
        let s = self.standard_part()?;
        let h = self.infinitesimal_part();
        let trunc = self.trunc.clone();
        match f {
            Elementary::Exp => {
                let series = LeviCivita::series(&h, |k| Some(Rational::factorial_recip(k)))?;
                series.scale(&s.apply(Elementary::Exp, precision)?)
            }
            Elementary::Sin | Elementary::Cos => {
                let sin_h = LeviCivita::series(&h, sin_coef)?;
                let cos_h = LeviCivita::series(&h, cos_coef)?;
                let sin_s = s.apply(Elementary::Sin, precision)?;
                let cos_s = s.apply(Elementary::Cos, precision)?;
                if f == Elementary::Sin {
                    // sin(s+h) = sin s cos h + cos s sin h
                    cos_h.scale(&sin_s)?.add(&sin_h.scale(&cos_s)?)
                } else {
                    // cos(s+h) = cos s cos h - sin s sin h
                    cos_h.scale(&cos_s)?.sub(&sin_h.scale(&sin_s)?)
                }
            }
            Elementary::Log => {
                match s.signum() {
                    1 => {}
                    0 if self.signum() > 0 => {
                        return Err(Error::not_representable(format!(
                            "log of the positive infinitesimal {self} is infinite"
                        )))
                    }
                    _ => return Err(Error::domain("log", format!("argument {self}"))),
                }
                // log(s + h) = log s + log(1 + h/s)
                let u = h.scale(&s.recip()?)?;
                let series = LeviCivita::series(&u, |k| {
                    Some(match k {
                        0 => Rational::zero(),
                        _ if k % 2 == 1 => Rational::frac(1, i64::from(k)),
                        _ => Rational::frac(-1, i64::from(k)),
                    })
                })?;
                let log_s = LeviCivita::constant(s.apply(Elementary::Log, precision)?, trunc);
                log_s.add(&series)
            }
            Elementary::Abs | Elementary::Sqrt => unreachable!("handled above"),
        }
    }
}
