//! Truncated left-finite series `Σ c_q ε^q` in a positive infinitesimal
//! generator `ε`, with exact rational exponents.
//!
//! Every value carries a cutoff `T`: it is meaningful modulo `ε^T`. Binary
//! operations keep the smaller cutoff, and equality checks only compare
//! terms below the common cutoff ([`LeviCivita::agrees_with`]).

mod backend;
mod elementary;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub use backend::{parse_lc, LcBackend};

use crate::error::{Error, Result};
use crate::numeric::{ExtOrder, Rational, Scalar};

/// Default cutoff exponent.
pub const DEFAULT_TRUNC: i64 = 8;

/// Upper bound on series terms generated by one expansion.
const MAX_SERIES_TERMS: usize = 4096;

/// Magnitude class of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LcClass {
    Zero,
    Infinitesimal,
    AppreciableFinite,
    Infinite,
}

#[derive(Clone, PartialEq)]
pub struct LeviCivita {
    /// Ascending exponents, all below `trunc`, no zero coefficients.
    terms: Vec<(Rational, Scalar)>,
    trunc: Rational,
}

impl LeviCivita {
    pub fn zero(trunc: Rational) -> Self {
        LeviCivita {
            terms: Vec::new(),
            trunc,
        }
    }

    pub fn constant(c: Scalar, trunc: Rational) -> Self {
        LeviCivita::monomial(c, Rational::zero(), trunc)
    }

    pub fn one(trunc: Rational) -> Self {
        LeviCivita::constant(Scalar::one(), trunc)
    }

    /// The generator `ε`.
    pub fn eps(trunc: Rational) -> Self {
        LeviCivita::monomial(Scalar::one(), Rational::one(), trunc)
    }

    pub fn monomial(c: Scalar, exponent: Rational, trunc: Rational) -> Self {
        let terms = if c.is_zero() || exponent >= trunc {
            Vec::new()
        } else {
            vec![(exponent, c)]
        };
        LeviCivita { terms, trunc }
    }

    /// Builds a series from arbitrary terms: like exponents are combined,
    /// zero coefficients and exponents at or above `trunc` are dropped.
    pub fn from_terms(
        terms: impl IntoIterator<Item = (Rational, Scalar)>,
        trunc: Rational,
    ) -> Result<Self> {
        let mut acc: BTreeMap<Rational, Scalar> = BTreeMap::new();
        for (e, c) in terms {
            if e >= trunc {
                continue;
            }
            let next = match acc.get(&e) {
                Some(existing) => existing.add(&c)?,
                None => c,
            };
            acc.insert(e, next);
        }
        Ok(LeviCivita::from_map(acc, trunc))
    }

    fn from_map(acc: BTreeMap<Rational, Scalar>, trunc: Rational) -> Self {
        LeviCivita {
            terms: acc
                .into_iter()
                .filter(|(e, c)| !c.is_zero() && *e < trunc)
                .collect(),
            trunc,
        }
    }

    pub fn terms(&self) -> &[(Rational, Scalar)] {
        &self.terms
    }

    pub fn trunc(&self) -> &Rational {
        &self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Re-declares the cutoff; terms at or above the new cutoff are dropped.
    pub fn with_trunc(&self, trunc: Rational) -> Self {
        LeviCivita {
            terms: self.terms.iter().filter(|(e, _)| *e < trunc).cloned().collect(),
            trunc,
        }
    }

    pub fn leading(&self) -> Option<(&Rational, &Scalar)> {
        self.terms.first().map(|(e, c)| (e, c))
    }

    pub fn coefficient(&self, exponent: &Rational) -> Scalar {
        self.terms
            .iter()
            .find(|(e, _)| e == exponent)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn is_exact(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_exact())
    }

    pub fn class(&self) -> LcClass {
        match self.leading() {
            None => LcClass::Zero,
            Some((e, _)) => match e.signum() {
                1 => LcClass::Infinitesimal,
                0 => LcClass::AppreciableFinite,
                _ => LcClass::Infinite,
            },
        }
    }

    pub fn is_finite(&self) -> bool {
        self.class() != LcClass::Infinite
    }

    pub fn add(&self, other: &LeviCivita) -> Result<LeviCivita> {
        let trunc = self.trunc.clone().min(other.trunc.clone());
        let mut acc: BTreeMap<Rational, Scalar> = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(other.terms.iter()) {
            if *e >= trunc {
                continue;
            }
            let next = match acc.get(e) {
                Some(existing) => existing.add(c)?,
                None => c.clone(),
            };
            acc.insert(e.clone(), next);
        }
        Ok(LeviCivita::from_map(acc, trunc))
    }

    pub fn neg(&self) -> LeviCivita {
        LeviCivita {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn sub(&self, other: &LeviCivita) -> Result<LeviCivita> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LeviCivita) -> Result<LeviCivita> {
        let trunc = self.trunc.clone().min(other.trunc.clone());
        let mut acc: BTreeMap<Rational, Scalar> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if e >= trunc {
                    // `other` is ascending, later terms are even larger.
                    break;
                }
                let p = ca.mul(cb)?;
                let next = match acc.get(&e) {
                    Some(existing) => existing.add(&p)?,
                    None => p,
                };
                acc.insert(e, next);
            }
        }
        Ok(LeviCivita::from_map(acc, trunc))
    }

    pub fn scale(&self, k: &Scalar) -> Result<LeviCivita> {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| Ok((e.clone(), k.mul(c)?)))
            .collect::<Result<Vec<_>>>()?;
        LeviCivita::from_terms(terms, self.trunc.clone())
    }

    /// Multiplies by `ε^shift`; the cutoff moves with the exponents.
    fn shift(&self, shift: &Rational) -> LeviCivita {
        LeviCivita {
            terms: self.terms.iter().map(|(e, c)| (e + shift, c.clone())).collect(),
            trunc: &self.trunc + shift,
        }
    }

    /// Splits a nonzero value as `c ε^q (1 + u)` and returns `(c, q, u)`,
    /// with `u` carrying the relative cutoff `rel_trunc`.
    fn factor(&self, rel_trunc: Rational) -> Result<(Scalar, Rational, LeviCivita)> {
        let (q, c) = self
            .leading()
            .map(|(q, c)| (q.clone(), c.clone()))
            .ok_or_else(|| Error::domain("factor", "zero series"))?;
        let inv_c = c.recip()?;
        let terms = self.terms[1..]
            .iter()
            .map(|(e, coef)| Ok((e - &q, coef.mul(&inv_c)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok((c, q, LeviCivita::from_terms(terms, rel_trunc)?))
    }

    /// `Σ_k coef(k) u^k` for an infinitesimal `u`, summed until the powers of
    /// `u` vanish below the cutoff. `coef` returns `None` once all later
    /// coefficients are zero.
    pub(crate) fn series(
        u: &LeviCivita,
        mut coef: impl FnMut(u32) -> Option<Rational>,
    ) -> Result<LeviCivita> {
        debug_assert!(u.class() == LcClass::Infinitesimal || u.is_zero());
        let trunc = u.trunc.clone();
        let mut acc: BTreeMap<Rational, Scalar> = BTreeMap::new();
        let mut power = LeviCivita::one(trunc.clone());
        for k in 0u32.. {
            if power.is_zero() || k as usize > MAX_SERIES_TERMS {
                break;
            }
            let Some(ck) = coef(k) else { break };
            if !ck.is_zero() {
                let ck = Scalar::Exact(ck);
                for (e, c) in &power.terms {
                    let p = ck.mul(c)?;
                    let next = match acc.get(e) {
                        Some(existing) => existing.add(&p)?,
                        None => p,
                    };
                    acc.insert(e.clone(), next);
                }
            }
            power = power.mul(u)?;
        }
        Ok(LeviCivita::from_map(acc, trunc))
    }

    /// Multiplicative inverse: leading monomial inversion times the
    /// geometric series `Σ (-u)^k`.
    pub fn invert(&self) -> Result<LeviCivita> {
        let (q, _) = self
            .leading()
            .ok_or_else(|| Error::domain("invert", "inverse of 0"))?;
        let rel = &self.trunc + q;
        let (c, q, u) = self.factor(rel)?;
        let geometric = LeviCivita::series(&u, |k| {
            Some(if k % 2 == 0 { Rational::one() } else { -Rational::one() })
        })?;
        geometric
            .shift(&-q)
            .scale(&c.recip()?)
            .map(|r| r.with_trunc(self.trunc.clone()))
    }

    pub fn div(&self, other: &LeviCivita) -> Result<LeviCivita> {
        self.mul(&other.invert()?)
    }

    /// `self^p` via `c^p ε^{qp} (1+u)^p` with the binomial series.
    pub fn pow_rational(&self, p: &Rational, precision: u32) -> Result<LeviCivita> {
        if p.is_zero() {
            return Ok(LeviCivita::one(self.trunc.clone()));
        }
        let Some((q, c)) = self.leading() else {
            return if p.is_positive() {
                Ok(self.clone())
            } else {
                Err(Error::domain("pow", format!("0^{p}")))
            };
        };
        if !p.is_integer() && c.signum() <= 0 {
            return Err(Error::domain(
                "pow",
                format!("non-integer power {p} of a series with leading coefficient {c}"),
            ));
        }
        let qp = q * p;
        let rel = &self.trunc - &qp;
        let (c, _, u) = self.factor(rel)?;
        let stop = p.to_i64().filter(|k| *k >= 0);
        let binomial = LeviCivita::series(&u, |k| match stop {
            Some(n) if i64::from(k) > n => None,
            _ => Some(Rational::binomial(p, k)),
        })?;
        let cp = c.pow_rational(p, precision)?;
        binomial
            .shift(&qp)
            .scale(&cp)
            .map(|r| r.with_trunc(self.trunc.clone()))
    }

    /// Sign of `self - other` from its leading coefficient.
    pub fn compare(&self, other: &LeviCivita) -> Result<Ordering> {
        let d = self.sub(other)?;
        Ok(match d.leading() {
            None => Ordering::Equal,
            Some((_, c)) => match c.signum() {
                1 => Ordering::Greater,
                -1 => Ordering::Less,
                _ => Ordering::Equal,
            },
        })
    }

    pub fn signum(&self) -> i32 {
        self.leading().map_or(0, |(_, c)| c.signum())
    }

    /// Leading exponent: the order of the quantity relative to `ε`.
    pub fn order(&self) -> Result<ExtOrder> {
        self.leading()
            .map(|(e, _)| ExtOrder::Finite(e.clone()))
            .ok_or_else(|| Error::domain("order", "order of 0 is undefined"))
    }

    /// The coefficient of `ε^0`; only defined on finite elements.
    pub fn standard_part(&self) -> Result<Scalar> {
        if !self.is_finite() {
            return Err(Error::domain(
                "st",
                format!("st is undefined on the infinite element {self}"),
            ));
        }
        Ok(self.coefficient(&Rational::zero()))
    }

    /// Terms with positive exponent.
    pub fn infinitesimal_part(&self) -> LeviCivita {
        LeviCivita {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.is_positive())
                .cloned()
                .collect(),
            trunc: self.trunc.clone(),
        }
    }

    /// Equality below the common cutoff.
    pub fn agrees_with(&self, other: &LeviCivita) -> bool {
        let t = self.trunc.clone().min(other.trunc.clone());
        self.with_trunc(t.clone()).terms == other.with_trunc(t).terms
    }
}

impl fmt::Display for LeviCivita {
    /// Text form `3 + 5*eps - eps^2`, `eps^(3/2)`, `1/2*eps^-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.signum() < 0;
            let mag = c.abs();
            if i == 0 {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            let power = if e.is_zero() {
                None
            } else if e.is_one() {
                Some("eps".to_string())
            } else if e.is_integer() {
                Some(format!("eps^{e}"))
            } else {
                Some(format!("eps^({e})"))
            };
            match power {
                None => write!(f, "{mag}")?,
                Some(p) if mag.is_one() => f.write_str(&p)?,
                Some(p) => write!(f, "{mag}*{p}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LeviCivita {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} + O(eps^{})", self.trunc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> Rational {
        Rational::from_integer(DEFAULT_TRUNC)
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn eps_pow(e: Rational) -> LeviCivita {
        LeviCivita::monomial(Scalar::one(), e, t())
    }

    fn lc(text: &str) -> LeviCivita {
        parse_lc(text, &t(), 15).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let s = eps_pow(q(1, 1)).add(&eps_pow(q(2, 1))).unwrap();
        assert_eq!(s.to_string(), "eps + eps^2");
        assert_eq!(s.order().unwrap(), ExtOrder::Finite(q(1, 1)));

        let p = eps_pow(q(1, 1)).mul(&eps_pow(q(2, 1))).unwrap();
        assert_eq!(p, eps_pow(q(3, 1)));

        let a = lc("1 + eps");
        assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn truncation_drops_high_terms() {
        let a = eps_pow(q(5, 1));
        assert!(a.mul(&a).unwrap().is_zero());
        let lower = LeviCivita::eps(q(3, 1));
        let sum = lower.add(&eps_pow(q(4, 1))).unwrap();
        assert_eq!(sum.trunc(), &q(3, 1));
        assert_eq!(sum, LeviCivita::eps(q(3, 1)));
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(eps_pow(q(1, 1)).invert().unwrap(), eps_pow(q(-1, 1)));
        let inv = lc("1 + eps").invert().unwrap();
        assert_eq!(inv.to_string(), "1 - eps + eps^2 - eps^3 + eps^4 - eps^5 + eps^6 - eps^7");
        let inv = lc("2*eps^2").invert().unwrap();
        assert_eq!(inv, LeviCivita::monomial(Scalar::Exact(q(1, 2)), q(-2, 1), t()));
        assert!(matches!(LeviCivita::zero(t()).invert(), Err(Error::Domain { .. })));
    }

    #[test]
    fn inverse_times_value_is_one() {
        for text in ["1 + eps", "3 - 2*eps^(1/2) + eps^3", "eps^-1 + 5", "2*eps^2 - eps^(5/2)"] {
            let a = lc(text);
            let prod = a.mul(&a.invert().unwrap()).unwrap();
            // an infinite factor pulls the cutoff error down by its order
            let q = a.leading().unwrap().0.clone().min(Rational::zero());
            let expect = LeviCivita::one(t() + q.clone());
            assert!(prod.with_trunc(t() + q).agrees_with(&expect), "{text}: {prod:?}");
        }
    }

    #[test]
    fn rational_powers() {
        assert_eq!(eps_pow(q(1, 1)).pow_rational(&q(1, 2), 15).unwrap(), eps_pow(q(1, 2)));
        assert_eq!(eps_pow(q(3, 1)).pow_rational(&q(1, 2), 15).unwrap(), eps_pow(q(3, 2)));
        let root = lc("4 + eps").pow_rational(&q(1, 2), 15).unwrap();
        let head: Vec<_> = root.terms()[..3].to_vec();
        assert_eq!(
            head,
            vec![
                (q(0, 1), Scalar::int(2)),
                (q(1, 1), Scalar::Exact(q(1, 4))),
                (q(2, 1), Scalar::Exact(q(-1, 64))),
            ]
        );
        // squaring recovers the radicand below the cutoff
        assert!(root.mul(&root).unwrap().agrees_with(&lc("4 + eps")));
        assert!(lc("-1 + eps").pow_rational(&q(1, 2), 15).is_err());
        assert_eq!(lc("-1 + eps").pow_rational(&q(2, 1), 15).unwrap(), lc("1 - 2*eps + eps^2"));
    }

    #[test]
    fn ordering_examples() {
        let e1 = eps_pow(q(1, 1));
        let e2 = eps_pow(q(2, 1));
        assert_eq!(e2.compare(&e1).unwrap(), Ordering::Less);
        let micro = LeviCivita::constant(Scalar::Exact(q(1, 1_000_000)), t());
        assert_eq!(e1.compare(&micro).unwrap(), Ordering::Less);
        let googol = LeviCivita::constant(
            Scalar::Exact(Rational::from_integer(10).checked_pow(100).unwrap()),
            t(),
        );
        assert_eq!(eps_pow(q(-1, 1)).compare(&googol).unwrap(), Ordering::Greater);
    }

    #[test]
    fn order_examples() {
        assert_eq!(lc("3*eps^2 + eps^5").order().unwrap(), ExtOrder::Finite(q(2, 1)));
        assert_eq!(eps_pow(q(3, 2)).order().unwrap(), ExtOrder::Finite(q(3, 2)));
        assert_eq!(lc("5").order().unwrap(), ExtOrder::Finite(q(0, 1)));
        assert!(LeviCivita::zero(t()).order().is_err());
    }

    #[test]
    fn standard_part_examples() {
        assert_eq!(lc("3 + 5*eps - eps^2").standard_part().unwrap(), Scalar::int(3));
        assert_eq!(lc("eps").standard_part().unwrap(), Scalar::zero());
        assert!(matches!(lc("eps^-1").standard_part(), Err(Error::Domain { .. })));
    }

    #[test]
    fn classes() {
        assert_eq!(LeviCivita::zero(t()).class(), LcClass::Zero);
        assert_eq!(lc("eps^(1/3)").class(), LcClass::Infinitesimal);
        assert_eq!(lc("2 + eps").class(), LcClass::AppreciableFinite);
        assert_eq!(lc("eps^-2 + 1").class(), LcClass::Infinite);
    }

    #[test]
    fn text_round_trip() {
        for text in ["3 + 5*eps - eps^2", "eps^(3/2)", "eps^-1", "1/2*eps^-2", "-eps + 2*eps^(7/3)"] {
            assert_eq!(lc(text).to_string(), text);
        }
    }
}
