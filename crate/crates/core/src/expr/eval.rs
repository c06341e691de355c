use super::{BinOp, Elementary, Expr, NamedConst};
use crate::error::{Error, Result};
use crate::numeric::{Rational, Scalar, DEFAULT_PRECISION};

/// Arithmetic and elementary-function semantics for one value domain.
///
/// Powers whose exponent folds to an exact rational go through
/// [`Backend::pow_rational`]; everything else uses [`Backend::pow`].
pub trait Backend {
    type Value: Clone;

    fn constant(&self, c: &Rational) -> Result<Self::Value>;
    fn named(&self, c: NamedConst) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn neg(&self, a: &Self::Value) -> Result<Self::Value>;
    fn pow_rational(&self, base: &Self::Value, p: &Rational) -> Result<Self::Value>;
    fn pow(&self, base: &Self::Value, exponent: &Self::Value) -> Result<Self::Value>;
    fn call(&self, f: Elementary, a: &Self::Value) -> Result<Self::Value>;
}

/// Evaluates `e` by structural recursion with the given variable bindings.
pub fn eval<B: Backend>(e: &Expr, backend: &B, bindings: &[(&str, B::Value)]) -> Result<B::Value> {
    match e {
        Expr::Const(r) => backend.constant(r),
        Expr::Named(c) => backend.named(*c),
        Expr::Var(v) => bindings
            .iter()
            .find(|(name, _)| name == v)
            .map(|(_, value)| value.clone())
            .ok_or_else(|| Error::usage(format!("unbound variable {v:?}"))),
        Expr::Neg(a) => backend.neg(&eval(a, backend, bindings)?),
        Expr::Call(f, a) => backend.call(*f, &eval(a, backend, bindings)?),
        Expr::Binary(BinOp::Pow, base, exponent) => {
            let b = eval(base, backend, bindings)?;
            match exponent.constant_value() {
                Some(p) => backend.pow_rational(&b, &p),
                None => backend.pow(&b, &eval(exponent, backend, bindings)?),
            }
        }
        Expr::Binary(op, a, b) => {
            let a = eval(a, backend, bindings)?;
            let b = eval(b, backend, bindings)?;
            match op {
                BinOp::Add => backend.add(&a, &b),
                BinOp::Sub => backend.sub(&a, &b),
                BinOp::Mul => backend.mul(&a, &b),
                BinOp::Div => backend.div(&a, &b),
                BinOp::Pow => unreachable!("handled above"),
            }
        }
    }
}

/// Evaluates a single-variable expression with its variable bound to `value`.
pub fn eval_at<B: Backend>(e: &Expr, backend: &B, value: B::Value) -> Result<B::Value> {
    let vars = e.variables();
    match vars.len() {
        0 => eval(e, backend, &[]),
        1 => {
            let name = vars.into_iter().next().expect("one variable");
            eval(e, backend, &[(name.as_str(), value)])
        }
        _ => Err(Error::usage(format!("expected one free variable, found {vars:?}"))),
    }
}

/// Exact rationals, promoting to `Approx` only where a result is irrational.
#[derive(Clone, Copy, Debug)]
pub struct ScalarBackend {
    pub precision: u32,
}

impl Default for ScalarBackend {
    fn default() -> Self {
        ScalarBackend {
            precision: DEFAULT_PRECISION,
        }
    }
}

impl Backend for ScalarBackend {
    type Value = Scalar;

    fn constant(&self, c: &Rational) -> Result<Scalar> {
        Ok(Scalar::Exact(c.clone()))
    }

    fn named(&self, c: NamedConst) -> Result<Scalar> {
        Scalar::approx(c.value(), self.precision)
    }

    fn add(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        a.add(b)
    }

    fn sub(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        a.sub(b)
    }

    fn mul(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        a.mul(b)
    }

    fn div(&self, a: &Scalar, b: &Scalar) -> Result<Scalar> {
        a.div(b)
    }

    fn neg(&self, a: &Scalar) -> Result<Scalar> {
        Ok(a.neg())
    }

    fn pow_rational(&self, base: &Scalar, p: &Rational) -> Result<Scalar> {
        base.pow_rational(p, self.precision)
    }

    fn pow(&self, base: &Scalar, exponent: &Scalar) -> Result<Scalar> {
        base.pow(exponent, self.precision)
    }

    fn call(&self, f: Elementary, a: &Scalar) -> Result<Scalar> {
        a.apply(f, self.precision)
    }
}

/// Plain `f64` evaluation for bulk sampling (series tails, finite differences).
#[derive(Clone, Copy, Debug, Default)]
pub struct F64Backend;

fn finite(x: f64, op: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::domain(op, format!("non-finite result {x}")))
    }
}

impl Backend for F64Backend {
    type Value = f64;

    fn constant(&self, c: &Rational) -> Result<f64> {
        Ok(c.to_f64())
    }

    fn named(&self, c: NamedConst) -> Result<f64> {
        Ok(c.value())
    }

    fn add(&self, a: &f64, b: &f64) -> Result<f64> {
        finite(a + b, "add")
    }

    fn sub(&self, a: &f64, b: &f64) -> Result<f64> {
        finite(a - b, "sub")
    }

    fn mul(&self, a: &f64, b: &f64) -> Result<f64> {
        finite(a * b, "mul")
    }

    fn div(&self, a: &f64, b: &f64) -> Result<f64> {
        if *b == 0.0 {
            return Err(Error::domain("div", format!("{a} / 0")));
        }
        finite(a / b, "div")
    }

    fn neg(&self, a: &f64) -> Result<f64> {
        Ok(-a)
    }

    fn pow_rational(&self, base: &f64, p: &Rational) -> Result<f64> {
        if let Some(k) = p.to_i64().and_then(|k| i32::try_from(k).ok()) {
            if *base == 0.0 && k < 0 {
                return Err(Error::domain("pow", format!("0^{k}")));
            }
            return finite(base.powi(k), "pow");
        }
        self.pow(base, &p.to_f64())
    }

    fn pow(&self, base: &f64, exponent: &f64) -> Result<f64> {
        if *base < 0.0 && exponent.fract() != 0.0 || *base == 0.0 && *exponent < 0.0 {
            return Err(Error::domain("pow", format!("({base})^({exponent})")));
        }
        finite(base.powf(*exponent), "pow")
    }

    fn call(&self, f: Elementary, a: &f64) -> Result<f64> {
        let y = f
            .eval_f64(*a)
            .ok_or_else(|| Error::domain(f.name(), format!("argument {a}")))?;
        finite(y, f.name())
    }
}
