use crate::error::{Error, Result};
use crate::expr::{eval, Expr};
use crate::levicivita::{LcBackend, LeviCivita, DEFAULT_TRUNC};
use crate::numeric::{Rational, Scalar, DEFAULT_PRECISION};

/// Truncation and precision for Levi-Civita evaluation.
#[derive(Clone, Debug)]
pub struct SeriesOptions {
    pub trunc: Rational,
    pub precision: u32,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        SeriesOptions {
            trunc: Rational::from_integer(DEFAULT_TRUNC),
            precision: DEFAULT_PRECISION,
        }
    }
}

impl SeriesOptions {
    pub fn backend(&self) -> LcBackend {
        LcBackend {
            trunc: self.trunc.clone(),
            precision: self.precision,
        }
    }
}

/// The single free variable of `e`, or `x` for constants.
pub fn free_variable(e: &Expr) -> Result<String> {
    let vars = e.variables();
    match vars.len() {
        0 => Ok("x".into()),
        1 => Ok(vars.into_iter().next().expect("one variable")),
        _ => Err(Error::usage(format!("expected a function of one variable, found {vars:?}"))),
    }
}

/// `f(x0 + h) - f(x0)` over Levi-Civita series.
pub fn increment(e: &Expr, x0: &Scalar, h: &LeviCivita, opts: &SeriesOptions) -> Result<LeviCivita> {
    let var = free_variable(e)?;
    let backend = opts.backend();
    let base = LeviCivita::constant(x0.clone(), opts.trunc.clone());
    let moved = eval(e, &backend, &[(var.as_str(), base.add(h)?)])?;
    let fixed = eval(e, &backend, &[(var.as_str(), base)])?;
    moved.sub(&fixed)
}

/// `st((f(x0 + ε) - f(x0)) / ε)`.
///
/// The quotient is also formed with `-ε`; an infinite quotient or a
/// mismatch between the two sides is reported as non-differentiability.
pub fn derivative_st(e: &Expr, x0: &Scalar, opts: &SeriesOptions) -> Result<Scalar> {
    let eps = LeviCivita::eps(opts.trunc.clone());
    let mut sides = Vec::with_capacity(2);
    for h in [eps.clone(), eps.neg()] {
        let q = increment(e, x0, &h, opts)?.mul(&h.invert()?)?;
        if !q.is_finite() {
            return Err(Error::NonDifferentiable {
                at: x0.to_string(),
                reason: format!("difference quotient {q} is infinite"),
            });
        }
        sides.push(q.standard_part()?);
    }
    let (right, left) = (&sides[0], &sides[1]);
    if !same_value(right, left) {
        return Err(Error::NonDifferentiable {
            at: x0.to_string(),
            reason: format!("one-sided quotients have standard parts {right} and {left}"),
        });
    }
    Ok(sides.swap_remove(0))
}

fn same_value(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x == y,
        _ => {
            let (x, y) = (a.to_f64(), b.to_f64());
            (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::derivative_dual;
    use crate::expr::parse;

    fn d(text: &str, x0: Scalar) -> Result<Scalar> {
        derivative_st(&parse(text).unwrap(), &x0, &SeriesOptions::default())
    }

    #[test]
    fn polynomial_is_exact() {
        for k in -3..=3 {
            let x0 = Scalar::Exact(Rational::frac(k, 3));
            assert_eq!(d("x^2", x0.clone()).unwrap(), x0.mul(&Scalar::int(2)).unwrap());
        }
        assert_eq!(d("x^3 - 2*x", Scalar::int(2)).unwrap(), Scalar::int(10));
    }

    #[test]
    fn exponential_slope_is_its_value() {
        let v = d("exp(x)", Scalar::one()).unwrap();
        assert!((v.to_f64() - std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn corners_and_cusps() {
        assert!(matches!(d("abs(x)", Scalar::zero()), Err(Error::NonDifferentiable { .. })));
        assert!(matches!(d("sqrt(x)", Scalar::zero()), Err(Error::NonDifferentiable { .. })));
        assert_eq!(d("abs(x)", Scalar::int(-2)).unwrap(), Scalar::int(-1));
        assert!(matches!(d("sin(1/x)", Scalar::zero()), Err(Error::NotRepresentable(_))));
    }

    #[test]
    fn agrees_with_dual_numbers() {
        for f in ["x^2*sin(x)", "exp(x)/(1+x^2)", "log(1+x)", "cos(x)^3"] {
            for x0 in [Scalar::Exact(Rational::frac(1, 3)), Scalar::int(2)] {
                let e = parse(f).unwrap();
                let lc = derivative_st(&e, &x0, &SeriesOptions::default()).unwrap();
                let dual = derivative_dual(&e, &x0, DEFAULT_PRECISION).unwrap();
                assert_eq!(lc.to_f64().to_bits(), dual.to_f64().to_bits(), "{f} at {x0}");
            }
        }
    }
}
