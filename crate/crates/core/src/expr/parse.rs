use std::fmt;

use thiserror::Error;

use super::{BinOp, Elementary, Expr, NamedConst};
use crate::numeric::Rational;

/// A malformed input, with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at offset {}: expected {}", self.offset, self.expected)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(r) => format!("number {r}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let lit = &text[start..i];
                let value: Rational = lit.parse().map_err(|_| ParseError {
                    offset: start,
                    expected: "a decimal number".into(),
                })?;
                out.push((start, Tok::Num(value)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((i, Tok::Op(c as char)));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            _ => {
                return Err(ParseError {
                    offset: i,
                    expected: "a number, identifier, operator or parenthesis".into(),
                })
            }
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: format!("{expected}, found {}", self.peek().describe()),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = match (op, &lhs, &rhs) {
                (BinOp::Div, Expr::Const(a), Expr::Const(b)) if !b.is_zero() => {
                    Expr::Const(a.checked_div(b).expect("nonzero"))
                }
                _ => Expr::binary(op, lhs, rhs),
            };
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Tok::Op('-') = self.peek() {
            self.bump();
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Const(r) => Expr::Const(-r),
                other => Expr::neg(other),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(r) => {
                self.bump();
                Ok(Expr::Const(r))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                match self.peek() {
                    Tok::RParen => {
                        self.bump();
                        Ok(inner)
                    }
                    _ => Err(self.error("')'")),
                }
            }
            Tok::Ident(name) => {
                if let Some(f) = Elementary::from_name(&name) {
                    self.bump();
                    if *self.peek() != Tok::LParen {
                        return Err(self.error(&format!("'(' after {name}")));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return Err(self.error("')'"));
                    }
                    self.bump();
                    return Ok(Expr::call(f, arg));
                }
                self.bump();
                Ok(match name.as_str() {
                    "pi" => Expr::Named(NamedConst::Pi),
                    "e" => Expr::Named(NamedConst::E),
                    _ => Expr::Var(name),
                })
            }
            _ => Err(self.error("an operand")),
        }
    }
}

fn parse_inner(text: &str) -> Result<(Expr, Vec<(usize, Tok)>), ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok((e, p.toks))
}

/// Parses an expression in at most one free variable.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let (e, toks) = parse_inner(text)?;
    let mut first: Option<&str> = None;
    for (offset, tok) in &toks {
        if let Tok::Ident(name) = tok {
            if Elementary::from_name(name).is_some() || name == "pi" || name == "e" {
                continue;
            }
            match first {
                None => first = Some(name),
                Some(v) if v == name => {}
                Some(v) => {
                    return Err(ParseError {
                        offset: *offset,
                        expected: format!("a single free variable (already using {v:?})"),
                    })
                }
            }
        }
    }
    Ok(e)
}

/// Parses an expression whose free variables must all be in `allowed`.
/// Used for parametrized families such as series terms in `k` and `x`.
pub fn parse_with_vars(text: &str, allowed: &[&str]) -> Result<Expr, ParseError> {
    let (e, toks) = parse_inner(text)?;
    for (offset, tok) in &toks {
        if let Tok::Ident(name) = tok {
            if Elementary::from_name(name).is_some() || name == "pi" || name == "e" {
                continue;
            }
            if !allowed.contains(&name.as_str()) {
                return Err(ParseError {
                    offset: *offset,
                    expected: format!("one of the variables {allowed:?}"),
                });
            }
        }
    }
    Ok(e)
}
