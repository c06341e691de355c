//! Expressions in one real variable: grammar, parser, printer and a
//! backend-generic evaluator.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'pi' | 'e' | ident | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | log | sqrt | abs
//! ```
//!
//! Numeric literals are decimals read as exact rationals. A quotient of two
//! literals (`1/2`) and a negated literal (`-3`) fold into a single constant.

mod eval;
mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{eval, eval_at, Backend, F64Backend, ScalarBackend};
pub use parse::{parse, parse_with_vars, ParseError};

pub use crate::numeric::Elementary;
use crate::numeric::Rational;

/// Symbolic constants. They stay symbolic until a backend materializes them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NamedConst {
    Pi,
    E,
}

impl NamedConst {
    pub fn name(self) -> &'static str {
        match self {
            NamedConst::Pi => "pi",
            NamedConst::E => "e",
        }
    }

    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => std::f64::consts::PI,
            NamedConst::E => std::f64::consts::E,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(Rational),
    Named(NamedConst),
    Var(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Elementary, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(Rational::from_integer(n))
    }

    pub fn rat(r: Rational) -> Expr {
        Expr::Const(r)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn pi() -> Expr {
        Expr::Named(NamedConst::Pi)
    }

    pub fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Add, a, b)
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Sub, a, b)
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Mul, a, b)
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Div, a, b)
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        Expr::binary(BinOp::Pow, a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        Expr::Neg(Box::new(a))
    }

    pub fn call(f: Elementary, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(r) => Some(r),
            _ => None,
        }
    }

    /// Free variable names, sorted.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Const(_) | Expr::Named(_) => {}
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Expr::Var(v) => v == name,
            Expr::Const(_) | Expr::Named(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.contains_var(name),
            Expr::Binary(_, a, b) => a.contains_var(name) || b.contains_var(name),
        }
    }

    /// Replaces every occurrence of `name` by `value`, structurally.
    pub fn substitute(&self, name: &str, value: &Expr) -> Expr {
        match self {
            Expr::Var(v) if v == name => value.clone(),
            Expr::Var(_) | Expr::Const(_) | Expr::Named(_) => self.clone(),
            Expr::Neg(a) => Expr::neg(a.substitute(name, value)),
            Expr::Call(f, a) => Expr::call(*f, a.substitute(name, value)),
            Expr::Binary(op, a, b) => {
                Expr::binary(*op, a.substitute(name, value), b.substitute(name, value))
            }
        }
    }

    /// Exact value of a variable-free, `pi`/`e`-free subtree.
    pub fn constant_value(&self) -> Option<Rational> {
        match self {
            Expr::Const(r) => Some(r.clone()),
            Expr::Named(_) | Expr::Var(_) | Expr::Call(..) => None,
            Expr::Neg(a) => a.constant_value().map(|r| -r),
            Expr::Binary(op, a, b) => {
                let a = a.constant_value()?;
                let b = b.constant_value()?;
                match op {
                    BinOp::Add => Some(&a + &b),
                    BinOp::Sub => Some(&a - &b),
                    BinOp::Mul => Some(&a * &b),
                    BinOp::Div => a.checked_div(&b).ok(),
                    BinOp::Pow => {
                        let k = b.to_i64()?;
                        if k.abs() > 64 {
                            return None;
                        }
                        a.checked_pow(k).ok()
                    }
                }
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Named(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print::print(self))
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_and_variables() {
        let e = parse("sin(1/x) + x^2").unwrap();
        assert_eq!(e.variables().into_iter().collect::<Vec<_>>(), vec!["x"]);
        let s = e.substitute("x", &Expr::var("n"));
        assert!(s.contains_var("n"));
        assert!(!s.contains_var("x"));
    }

    #[test]
    fn constant_folding() {
        assert_eq!(
            parse("(1/2 + 1/3)*6").unwrap().constant_value(),
            Some(Rational::from_integer(5))
        );
        assert_eq!(parse("2^-2").unwrap().constant_value(), Some(Rational::frac(1, 4)));
        assert_eq!(parse("pi").unwrap().constant_value(), None);
        assert_eq!(parse("1/(1-1)").unwrap().constant_value(), None);
    }
}
