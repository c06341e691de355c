//! Dominance normal form: finite sums `Σ c · exp(r n) · n^p · log(n)^q`
//! in decreasing order of growth, plus an `O(scale)` remainder.
//!
//! A term is only kept while its scale strictly dominates the remainder, so
//! the leading term of a series, when there is one, decides its sign.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use super::coef::Coef;
use crate::expr::{BinOp, Elementary, Expr, NamedConst};
use crate::numeric::Rational;

/// Terms kept per series; smaller terms are folded into the remainder.
const TERM_CAP: usize = 24;

/// Terms of a truncated power series (`exp`, `log(1+u)`, binomial, trig).
const SERIES_ORDER: u32 = 10;

/// The growth scale `exp(r n) n^p log(n)^q`, ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scale {
    pub r: Rational,
    pub p: Rational,
    pub q: Rational,
}

impl Scale {
    pub fn new(r: Rational, p: Rational, q: Rational) -> Self {
        Scale { r, p, q }
    }

    pub fn one() -> Self {
        Scale::new(Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn n_pow(p: Rational) -> Self {
        Scale::new(Rational::zero(), p, Rational::zero())
    }

    pub fn log_pow(q: Rational) -> Self {
        Scale::new(Rational::zero(), Rational::zero(), q)
    }

    pub fn mul(&self, other: &Scale) -> Scale {
        Scale::new(&self.r + &other.r, &self.p + &other.p, &self.q + &other.q)
    }

    pub fn div(&self, other: &Scale) -> Scale {
        Scale::new(&self.r - &other.r, &self.p - &other.p, &self.q - &other.q)
    }

    pub fn pow(&self, k: &Rational) -> Scale {
        Scale::new(&self.r * k, &self.p * k, &self.q * k)
    }

    /// Sign of `log` of the scale at infinity: `-1` vanishing, `0` constant, `1` unbounded.
    pub fn growth(&self) -> i32 {
        match self.cmp(&Scale::one()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    /// `ln` of the scale at `n = e^ln_n`.
    pub fn ln_at(&self, ln_n: f64) -> f64 {
        let mut v = self.p.to_f64() * ln_n;
        if !self.r.is_zero() {
            v += self.r.to_f64() * ln_n.exp();
        }
        if !self.q.is_zero() {
            v += self.q.to_f64() * ln_n.ln();
        }
        v
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let pow = |base: &str, e: &Rational| {
            if e.is_one() {
                base.to_string()
            } else if e.is_integer() && !e.is_negative() {
                format!("{base}^{e}")
            } else {
                format!("{base}^({e})")
            }
        };
        if !self.r.is_zero() {
            parts.push(if self.r.is_one() {
                "exp(n)".to_string()
            } else {
                format!("exp({}*n)", self.r)
            });
        }
        if !self.p.is_zero() {
            parts.push(pow("n", &self.p));
        }
        if !self.q.is_zero() {
            parts.push(pow("log(n)", &self.q));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// A germ in dominance normal form.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymSeries {
    /// Strictly decreasing scales, all above `error`, no exact-zero coefficients.
    terms: Vec<(Scale, Coef)>,
    /// Remainder bound `O(scale)`; `None` means the terms are the whole germ.
    error: Option<Scale>,
}

impl AsymSeries {
    pub fn zero() -> Self {
        AsymSeries {
            terms: Vec::new(),
            error: None,
        }
    }

    pub fn constant(c: Coef) -> Self {
        AsymSeries::monomial(c, Scale::one())
    }

    pub fn monomial(c: Coef, s: Scale) -> Self {
        AsymSeries::build(BTreeMap::from([(s, c)]), None)
    }

    pub fn n() -> Self {
        AsymSeries::monomial(Coef::int(1), Scale::n_pow(Rational::one()))
    }

    fn error_only(s: Scale) -> Self {
        AsymSeries {
            terms: Vec::new(),
            error: Some(s),
        }
    }

    fn build(map: BTreeMap<Scale, Coef>, error: Option<Scale>) -> Self {
        let mut error = error;
        let mut terms: Vec<(Scale, Coef)> = map
            .into_iter()
            .rev()
            .filter(|(s, c)| !c.is_exact_zero() && error.as_ref().map_or(true, |e| s > e))
            .collect();
        if terms.len() > TERM_CAP {
            let dropped = terms[TERM_CAP].0.clone();
            terms.truncate(TERM_CAP);
            error = Some(error.map_or(dropped.clone(), |e| e.max(dropped)));
        }
        AsymSeries { terms, error }
    }

    pub fn terms(&self) -> &[(Scale, Coef)] {
        &self.terms
    }

    pub fn error(&self) -> Option<&Scale> {
        self.error.as_ref()
    }

    pub fn leading(&self) -> Option<&(Scale, Coef)> {
        self.terms.first()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.error.is_none()
    }

    /// Largest scale present, term or remainder.
    pub fn top(&self) -> Option<Scale> {
        match (self.terms.first(), &self.error) {
            (Some((s, _)), _) => Some(s.clone()),
            (None, e) => e.clone(),
        }
    }

    /// Sign of the germ when the leading term dominates everything else.
    pub fn sign(&self) -> Option<i32> {
        match self.leading() {
            Some((_, c)) => c.signum(),
            None if self.error.is_none() => Some(0),
            None => None,
        }
    }

    pub fn add(&self, other: &AsymSeries) -> AsymSeries {
        let mut error = max_opt(self.error.clone(), other.error.clone());
        let mut map: BTreeMap<Scale, Coef> = self.terms.iter().cloned().collect();
        for (s, c) in &other.terms {
            match map.remove(s) {
                None => {
                    map.insert(s.clone(), c.clone());
                }
                Some(existing) => match existing.add(c) {
                    Some(sum) => {
                        map.insert(s.clone(), sum);
                    }
                    // cancellation of approximate coefficients: only the scale survives
                    None => error = max_opt(error, Some(s.clone())),
                },
            }
        }
        AsymSeries::build(map, error)
    }

    pub fn neg(&self) -> AsymSeries {
        AsymSeries {
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c.neg())).collect(),
            error: self.error.clone(),
        }
    }

    pub fn sub(&self, other: &AsymSeries) -> AsymSeries {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &AsymSeries) -> AsymSeries {
        let mut error = None;
        if let (Some(e), Some(t)) = (&self.error, other.top()) {
            error = max_opt(error, Some(e.mul(&t)));
        }
        if let (Some(e), Some(t)) = (&other.error, self.top()) {
            error = max_opt(error, Some(e.mul(&t)));
        }
        let mut map: BTreeMap<Scale, Coef> = BTreeMap::new();
        for (sa, ca) in &self.terms {
            for (sb, cb) in &other.terms {
                let s = sa.mul(sb);
                if error.as_ref().is_some_and(|e| &s <= e) {
                    continue;
                }
                let Some(p) = ca.mul(cb) else {
                    error = max_opt(error, Some(s));
                    continue;
                };
                match map.remove(&s) {
                    None => {
                        map.insert(s, p);
                    }
                    Some(existing) => match existing.add(&p) {
                        Some(sum) => {
                            map.insert(s, sum);
                        }
                        None => error = max_opt(error, Some(s)),
                    },
                }
            }
        }
        AsymSeries::build(map, error)
    }

    pub fn scale_by(&self, k: &Coef) -> AsymSeries {
        self.mul(&AsymSeries::constant(k.clone()))
    }

    /// Splits off the leading term: `self = c · m · (1 + u)` with `u → 0`.
    fn factor(&self) -> Option<(Coef, Scale, AsymSeries)> {
        let (m, c) = self.leading()?.clone();
        let inv = c.recip()?;
        let mut map = BTreeMap::new();
        for (s, k) in &self.terms[1..] {
            map.insert(s.div(&m), k.mul(&inv)?);
        }
        let error = self.error.as_ref().map(|e| e.div(&m));
        Some((c, m, AsymSeries::build(map, error)))
    }

    /// `Σ_k coef(k) u^k` for `u → 0`, truncated after `SERIES_ORDER` terms
    /// with the first omitted power as remainder.
    fn power_series(u: &AsymSeries, coef: impl Fn(u32) -> Option<Rational>) -> Option<AsymSeries> {
        let top = match u.top() {
            None => return Some(AsymSeries::constant(Coef::rational(coef(0).unwrap_or_else(Rational::zero)))),
            Some(t) if t.growth() < 0 => t,
            Some(_) => return None,
        };
        let mut sum = AsymSeries::zero();
        let mut power = AsymSeries::constant(Coef::int(1));
        for k in 0..=SERIES_ORDER {
            let Some(ck) = coef(k) else {
                return Some(sum);
            };
            if !ck.is_zero() {
                sum = sum.add(&power.scale_by(&Coef::rational(ck)));
            }
            power = power.mul(u);
            if power.is_exact_zero() {
                return Some(sum);
            }
        }
        let rest = top.pow(&Rational::from_integer(i64::from(SERIES_ORDER) + 1));
        Some(sum.add(&AsymSeries::error_only(rest)))
    }

    pub fn pow_rational(&self, p: &Rational) -> Option<AsymSeries> {
        if p.is_zero() {
            return Some(AsymSeries::constant(Coef::int(1)));
        }
        if self.terms.is_empty() {
            return match &self.error {
                None if p.is_positive() => Some(AsymSeries::zero()),
                Some(e) if p.is_positive() => Some(AsymSeries::error_only(e.pow(p))),
                _ => None,
            };
        }
        let (c, m, u) = self.factor()?;
        let cp = c.pow_rational(p)?;
        let stop = p.to_i64().filter(|k| *k >= 0);
        let series = AsymSeries::power_series(&u, |k| match stop {
            Some(n) if i64::from(k) > n => None,
            _ => Some(Rational::binomial(p, k)),
        })?;
        Some(series.mul(&AsymSeries::monomial(cp, m.pow(p))))
    }

    pub fn recip(&self) -> Option<AsymSeries> {
        self.pow_rational(&Rational::from_integer(-1))
    }

    /// Splits into growing terms, the constant coefficient, and the vanishing rest.
    fn split(&self) -> (Vec<(Scale, Coef)>, Coef, AsymSeries) {
        let mut growing = Vec::new();
        let mut constant = Coef::int(0);
        let mut rest = BTreeMap::new();
        for (s, c) in &self.terms {
            match s.growth() {
                1 => growing.push((s.clone(), c.clone())),
                0 => constant = c.clone(),
                _ => {
                    rest.insert(s.clone(), c.clone());
                }
            }
        }
        (growing, constant, AsymSeries::build(rest, self.error.clone()))
    }

    pub fn exp(&self) -> Option<AsymSeries> {
        if self.error.as_ref().is_some_and(|e| e.growth() >= 0) {
            return None;
        }
        let (growing, c0, rest) = self.split();
        let mut scale = Scale::one();
        for (s, c) in growing {
            let k = c.as_rational()?;
            if s == Scale::n_pow(Rational::one()) {
                scale.r = k;
            } else if s == Scale::log_pow(Rational::one()) {
                scale.p = k;
            } else {
                return None;
            }
        }
        let head = AsymSeries::monomial(c0.apply(Elementary::Exp)?, scale);
        let tail = AsymSeries::power_series(&rest, |k| Some(Rational::factorial_recip(k)))?;
        Some(head.mul(&tail))
    }

    pub fn log(&self) -> Option<AsymSeries> {
        let (c, m, u) = self.factor()?;
        if c.signum()? <= 0 || !m.q.is_zero() {
            return None;
        }
        let mut map = BTreeMap::new();
        if let Some(lc) = c.apply(Elementary::Log) {
            map.insert(Scale::one(), lc);
        } else {
            return None;
        }
        map.insert(Scale::n_pow(Rational::one()), Coef::rational(m.r.clone()));
        map.insert(Scale::log_pow(Rational::one()), Coef::rational(m.p.clone()));
        let head = AsymSeries::build(map, None);
        let tail = AsymSeries::power_series(&u, |k| {
            Some(match k {
                0 => Rational::zero(),
                _ if k % 2 == 1 => Rational::frac(1, i64::from(k)),
                _ => Rational::frac(-1, i64::from(k)),
            })
        })?;
        Some(head.add(&tail))
    }

    /// `sin`/`cos`; an unbounded argument is only accepted when it is an even
    /// multiple of `pi*n`, which drops out for integer `n`.
    pub fn trig(&self, f: Elementary) -> Option<AsymSeries> {
        if self.error.as_ref().is_some_and(|e| e.growth() >= 0) {
            return None;
        }
        let (growing, theta, rest) = self.split();
        for (s, c) in growing {
            if s != Scale::n_pow(Rational::one()) || !is_even_pi_multiple(&c) {
                return None;
            }
        }
        let sin_t = theta.apply(Elementary::Sin)?;
        let cos_t = theta.apply(Elementary::Cos)?;
        let sin_r = AsymSeries::power_series(&rest, |k| Some(trig_coef(k, 1)))?;
        let cos_r = AsymSeries::power_series(&rest, |k| Some(trig_coef(k, 0)))?;
        Some(match f {
            Elementary::Sin => cos_r.scale_by(&sin_t).add(&sin_r.scale_by(&cos_t)),
            _ => cos_r.scale_by(&cos_t).sub(&sin_r.scale_by(&sin_t)),
        })
    }

    pub fn abs(&self) -> Option<AsymSeries> {
        match self.sign() {
            Some(s) if s < 0 => Some(self.neg()),
            Some(_) => Some(self.clone()),
            None if self.terms.is_empty() => Some(self.clone()),
            None => None,
        }
    }

    /// `log2` of the index beyond which the leading term outweighs the sum of
    /// all other terms (remainder taken with unit constant), scanning `n = 2^k`.
    pub fn dominance_threshold_log2(&self) -> Option<f64> {
        let (lead, c) = self.leading()?;
        let lead_ln = |ln_n: f64| c.to_f64().abs().ln() + lead.ln_at(ln_n);
        let rest_ln = |ln_n: f64| {
            let mut parts: Vec<f64> = self.terms[1..]
                .iter()
                .map(|(s, k)| k.to_f64().abs().ln() + s.ln_at(ln_n))
                .collect();
            if let Some(e) = &self.error {
                parts.push(e.ln_at(ln_n));
            }
            log_sum_exp(&parts)
        };
        let mut last_bad = 0u32;
        for k in 1..=4096u32 {
            let ln_n = f64::from(k) * std::f64::consts::LN_2;
            if lead_ln(ln_n) <= rest_ln(ln_n) {
                last_bad = k;
            }
        }
        (last_bad < 4096).then(|| f64::from(last_bad + 1))
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn max_opt(a: Option<Scale>, b: Option<Scale>) -> Option<Scale> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

fn is_even_pi_multiple(c: &Coef) -> bool {
    c.pi_multiple()
        .is_some_and(|d| d.is_integer() && (&d * &Rational::frac(1, 2)).is_integer())
}

/// Taylor coefficients of `sin` (`parity` 1) and `cos` (`parity` 0).
fn trig_coef(k: u32, parity: u32) -> Rational {
    if k % 2 != parity {
        return Rational::zero();
    }
    let r = Rational::factorial_recip(k);
    if (k / 2) % 2 == 0 {
        r
    } else {
        -r
    }
}

impl fmt::Display for AsymSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (s, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if *s == Scale::one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*{s}")?;
            }
        }
        if let Some(e) = &self.error {
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "O({e})")?;
        }
        Ok(())
    }
}

/// Normal form of an expression in `var`, or `None` outside the dominance grammar.
pub fn normalize(e: &Expr, var: &str) -> Option<AsymSeries> {
    Some(match e {
        Expr::Const(r) => AsymSeries::constant(Coef::rational(r.clone())),
        Expr::Named(NamedConst::Pi) => AsymSeries::constant(Coef::pi()),
        Expr::Named(NamedConst::E) => AsymSeries::constant(Coef::approx(std::f64::consts::E, 15)?),
        Expr::Var(v) if v == var => AsymSeries::n(),
        Expr::Var(_) => return None,
        Expr::Neg(a) => normalize(a, var)?.neg(),
        Expr::Binary(BinOp::Pow, base, exponent) => {
            if **base == Expr::Named(NamedConst::E) {
                return normalize(exponent, var)?.exp();
            }
            let b = normalize(base, var)?;
            match exponent.constant_value() {
                Some(p) => b.pow_rational(&p)?,
                None => normalize(exponent, var)?.mul(&b.log()?).exp()?,
            }
        }
        Expr::Binary(op, a, b) => {
            let a = normalize(a, var)?;
            let b = normalize(b, var)?;
            match op {
                BinOp::Add => a.add(&b),
                BinOp::Sub => a.sub(&b),
                BinOp::Mul => a.mul(&b),
                BinOp::Div => a.mul(&b.recip()?),
                BinOp::Pow => unreachable!("handled above"),
            }
        }
        Expr::Call(f, a) => {
            let a = normalize(a, var)?;
            match f {
                Elementary::Exp => a.exp()?,
                Elementary::Log => a.log()?,
                Elementary::Sin | Elementary::Cos => a.trig(*f)?,
                Elementary::Sqrt => a.pow_rational(&Rational::frac(1, 2))?,
                Elementary::Abs => a.abs()?,
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn norm(text: &str) -> AsymSeries {
        normalize(&parse(text).unwrap(), "n").unwrap_or_else(|| panic!("{text} not normalizable"))
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::frac(a, b)
    }

    #[test]
    fn monomials_and_sums() {
        let s = norm("n^(1/10) - log(n)^3");
        assert_eq!(s.terms().len(), 2);
        assert_eq!(s.leading().unwrap().0, Scale::n_pow(q(1, 10)));
        assert_eq!(s.sign(), Some(1));
        assert!(s.error().is_none());
    }

    #[test]
    fn exact_cancellation() {
        assert!(norm("(n+1)/n - 1 - 1/n").is_exact_zero());
        assert!(norm("sin(2*pi*n)").is_exact_zero());
        assert_eq!(norm("sin(2*pi*n + pi/2)"), AsymSeries::constant(Coef::int(1)));
    }

    #[test]
    fn inverse_of_a_sum_keeps_its_pi_coefficient() {
        let s = norm("sin(1/(1/(2*pi*n + pi/2)))");
        let (sc, c) = s.leading().unwrap();
        assert_eq!((sc.clone(), c.clone()), (Scale::one(), Coef::int(1)));
        assert!(s.error().unwrap().growth() < 0);
    }

    #[test]
    fn square_root_difference() {
        let s = norm("sqrt(n^2 + 1) - n");
        assert_eq!(s.leading().unwrap(), &(Scale::n_pow(q(-1, 1)), Coef::rational(q(1, 2))));
    }

    #[test]
    fn exp_and_log() {
        let s = norm("exp(-n)*n^64");
        assert_eq!(s.leading().unwrap().0, Scale::new(q(-1, 1), q(64, 1), q(0, 1)));
        let s = norm("1/log(1/n)");
        assert_eq!(s.leading().unwrap(), &(Scale::log_pow(q(-1, 1)), Coef::int(-1)));
        let s = norm("log(n+1) - log(n)");
        assert_eq!(s.leading().unwrap(), &(Scale::n_pow(q(-1, 1)), Coef::int(1)));
        let s = norm("exp(1/n)");
        assert_eq!(s.leading().unwrap(), &(Scale::one(), Coef::int(1)));
    }

    #[test]
    fn outside_the_grammar() {
        for text in ["(-1)^n/n", "sin(n)", "2^n", "exp(n^2)", "log(log(n))", "sin(pi*n)"] {
            assert!(normalize(&parse(text).unwrap(), "n").is_none(), "{text}");
        }
    }

    #[test]
    fn approximate_cancellation_becomes_remainder() {
        let s = norm("exp(1)*n - e*n + 1");
        // the n terms cancel to rounding noise; they cannot be trusted to decide anything
        assert_eq!(s.top().unwrap(), Scale::n_pow(q(1, 1)));
        assert!(s.leading().is_none());
        assert_eq!(s.sign(), None);
    }

    #[test]
    fn threshold_of_the_adversarial_pair() {
        let s = norm("n^(1/10) - log(n)^3");
        let k = s.dominance_threshold_log2().unwrap();
        // ln n ≈ 151 at the crossover, i.e. n ≈ 2^218
        assert!((210.0..230.0).contains(&k), "{k}");
    }
}
