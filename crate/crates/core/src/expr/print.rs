use super::{BinOp, Expr};

// Binding strength of the printed form of each node.
const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn strength(e: &Expr) -> u8 {
    match e {
        Expr::Const(r) if !r.is_integer() => MUL,
        Expr::Const(r) if r.is_negative() => UNARY,
        Expr::Const(_) | Expr::Named(_) | Expr::Var(_) | Expr::Call(..) => ATOM,
        Expr::Neg(_) => UNARY,
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => ADD,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => MUL,
        Expr::Binary(BinOp::Pow, ..) => POW,
    }
}

fn starts_with_minus(e: &Expr) -> bool {
    match e {
        Expr::Const(r) => r.is_negative(),
        Expr::Neg(_) => true,
        Expr::Binary(_, a, _) => starts_with_minus(a),
        _ => false,
    }
}

fn wrap(out: &mut String, e: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write(out, e);
        out.push(')');
    } else {
        write(out, e);
    }
}

fn write(out: &mut String, e: &Expr) {
    match e {
        Expr::Const(r) => out.push_str(&r.to_string()),
        Expr::Named(c) => out.push_str(c.name()),
        Expr::Var(v) => out.push_str(v),
        Expr::Call(f, a) => {
            out.push_str(f.name());
            wrap(out, a, true);
        }
        Expr::Neg(a) => {
            out.push('-');
            wrap(out, a, strength(a) < UNARY);
        }
        Expr::Binary(op, a, b) => {
            let (left, right) = match op {
                BinOp::Add | BinOp::Sub => (strength(a) < ADD, strength(b) <= ADD),
                BinOp::Mul | BinOp::Div => (strength(a) < MUL, strength(b) <= MUL),
                BinOp::Pow => (strength(a) <= POW || starts_with_minus(a), strength(b) < UNARY),
            };
            wrap(out, a, left);
            out.push(op.symbol());
            let right = right || (*op != BinOp::Pow && starts_with_minus(b));
            wrap(out, b, right);
        }
    }
}

/// Canonical text form; `parse(&print(e))` reproduces any parsed `e`.
pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    write(&mut out, e);
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn roundtrip(text: &str) -> String {
        let e = parse(text).unwrap();
        let printed = print(&e);
        assert_eq!(parse(&printed).unwrap(), e, "{text} -> {printed}");
        printed
    }

    #[test]
    fn examples() {
        assert_eq!(roundtrip("x^2 + 1"), "x^2+1");
        assert_eq!(roundtrip("sin(x)*exp(x)"), "sin(x)*exp(x)");
        assert_eq!(roundtrip("1/2*x"), "1/2*x");
    }

    #[test]
    fn parenthesization() {
        assert_eq!(roundtrip("x-(y-1)".replace('y', "x").as_str()), "x-(x-1)");
        assert_eq!(roundtrip("(x^2)^3"), "(x^2)^3");
        assert_eq!(roundtrip("x^2^3"), "x^2^3");
        assert_eq!(roundtrip("(-x)^2"), "(-x)^2");
        assert_eq!(roundtrip("-(x*2)"), "-(x*2)");
        assert_eq!(roundtrip("x^(3/2)"), "x^(3/2)");
        assert_eq!(roundtrip("x^-1"), "x^-1");
        assert_eq!(roundtrip("x - -3"), "x-(-3)");
        assert_eq!(roundtrip("x/(1/2)"), "x/(1/2)");
        assert_eq!(roundtrip("(1/2)^x"), "(1/2)^x");
        assert_eq!(roundtrip("(-2)^x"), "(-2)^x");
        assert_eq!(roundtrip("2*(-x)"), "2*(-x)");
    }
}
