//! Coefficients of the asymptotic normal form: exact Laurent polynomials in
//! `pi` with rational coefficients, or approximate reals.
//!
//! Keeping `pi` symbolic is what lets `sin(2*pi*n)` reduce to an exact zero.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::numeric::{Approx, Elementary, Rational, Scalar, DEFAULT_PRECISION};

/// Relative size below which an approximate sum counts as cancelled.
pub(crate) const CANCEL_TOL: f64 = 1e-12;

/// Largest prime tried when factoring a rational under a fractional power.
const FACTOR_LIMIT: u64 = 1 << 20;

/// `π^pi · Π p^e` with every prime exponent `e` in `(0, 1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Mono {
    pub pi: Rational,
    pub surd: BTreeMap<u64, Rational>,
}

impl Mono {
    fn is_one(&self) -> bool {
        self.pi.is_zero() && self.surd.is_empty()
    }

    fn to_f64(&self) -> f64 {
        self.surd
            .iter()
            .fold(PI.powf(self.pi.to_f64()), |acc, (p, e)| acc * (*p as f64).powf(e.to_f64()))
    }
}

/// Moves whole powers of primes out of the surd part into the rational factor.
fn reduce(mut a: Rational, pi: Rational, surd: BTreeMap<u64, Rational>) -> Option<(Rational, Mono)> {
    let mut kept = BTreeMap::new();
    for (p, e) in surd {
        let whole = e.floor();
        let frac = &e - &whole;
        if !whole.is_zero() {
            let k = whole.to_i64()?;
            a = &a * &Rational::from_integer(p).checked_pow(k).ok()?;
        }
        if !frac.is_zero() {
            kept.insert(p, frac);
        }
    }
    Some((a, Mono { pi, surd: kept }))
}

fn mono_mul(x: &Mono, y: &Mono) -> Option<(Rational, Mono)> {
    let mut surd = x.surd.clone();
    for (p, e) in &y.surd {
        let next = surd.get(p).map_or_else(|| e.clone(), |v| v + e);
        surd.insert(*p, next);
    }
    reduce(Rational::one(), &x.pi + &y.pi, surd)
}

/// Prime factorization of a positive integer by trial division.
fn factor(n: &BigInt) -> Option<BTreeMap<u64, i64>> {
    let mut n = n.to_u64()?;
    let mut out = BTreeMap::new();
    let mut p = 2u64;
    while p * p <= n {
        if p > FACTOR_LIMIT {
            return None;
        }
        while n % p == 0 {
            *out.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *out.entry(n).or_insert(0) += 1;
    }
    Some(out)
}

/// `a^p` for a positive rational `a`, as a rational times a surd.
fn rational_power(a: &Rational, p: &Rational) -> Option<(Rational, Mono)> {
    if !a.is_positive() {
        return None;
    }
    let mut surd: BTreeMap<u64, Rational> = BTreeMap::new();
    for (q, k) in factor(a.numer())? {
        surd.insert(q, &Rational::from_integer(k) * p);
    }
    for (q, k) in factor(a.denom())? {
        surd.insert(q, &Rational::from_integer(-k) * p);
    }
    reduce(Rational::one(), Rational::zero(), surd)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coef {
    /// `Σ a_m · m` over monomials `m` in `π` and prime surds, zero entries removed.
    Exact(BTreeMap<Mono, Rational>),
    Approx(f64, u32),
}

impl Coef {
    pub fn rational(r: Rational) -> Coef {
        let mut m = BTreeMap::new();
        if !r.is_zero() {
            m.insert(Mono::default(), r);
        }
        Coef::Exact(m)
    }

    pub fn int(n: i64) -> Coef {
        Coef::rational(Rational::from_integer(n))
    }

    pub fn pi() -> Coef {
        let m = Mono {
            pi: Rational::one(),
            surd: BTreeMap::new(),
        };
        Coef::Exact(BTreeMap::from([(m, Rational::one())]))
    }

    pub fn approx(x: f64, precision: u32) -> Option<Coef> {
        x.is_finite().then_some(Coef::Approx(x, precision.max(DEFAULT_PRECISION)))
    }

    pub fn from_scalar(s: &Scalar) -> Coef {
        match s {
            Scalar::Exact(r) => Coef::rational(r.clone()),
            Scalar::Approx(a) => Coef::Approx(a.value(), a.precision()),
        }
    }

    /// The plain rational value, when there is no `pi` or surd part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self {
            Coef::Exact(m) if m.is_empty() => Some(Rational::zero()),
            Coef::Exact(m) if m.len() == 1 => m.get(&Mono::default()).cloned(),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coef::Exact(_))
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, Coef::Exact(m) if m.is_empty())
    }

    fn precision(&self) -> u32 {
        match self {
            Coef::Exact(_) => u32::MAX,
            Coef::Approx(_, p) => *p,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Coef::Exact(m) => m.iter().map(|(k, a)| a.to_f64() * k.to_f64()).sum(),
            Coef::Approx(x, _) => *x,
        }
    }

    /// Sum of absolute term values, the scale against which cancellation is judged.
    fn magnitude(&self) -> f64 {
        match self {
            Coef::Exact(m) => m.iter().map(|(k, a)| a.to_f64().abs() * k.to_f64()).sum(),
            Coef::Approx(x, _) => x.abs(),
        }
    }

    fn mixed_precision(&self, other: &Coef) -> u32 {
        self.precision().min(other.precision())
    }

    /// Precision to claim when this coefficient turns approximate.
    fn approx_precision(&self) -> u32 {
        match self {
            Coef::Exact(_) => DEFAULT_PRECISION,
            Coef::Approx(_, p) => *p,
        }
    }

    /// `d` when the coefficient is exactly `d·π`.
    pub fn pi_multiple(&self) -> Option<Rational> {
        let (k, a) = self.single()?;
        (k.pi.is_one() && k.surd.is_empty()).then(|| a.clone())
    }

    fn single(&self) -> Option<(&Mono, &Rational)> {
        match self {
            Coef::Exact(m) if m.len() == 1 => m.iter().next(),
            _ => None,
        }
    }

    /// Sign, or `None` when it cannot be trusted (an approximate zero, or an
    /// exact sum too close to zero to resolve in double precision).
    pub fn signum(&self) -> Option<i32> {
        if let Some((_, a)) = self.single() {
            return Some(a.signum());
        }
        match self {
            Coef::Exact(m) if m.is_empty() => Some(0),
            Coef::Exact(_) => {
                let v = self.to_f64();
                (v.abs() > 1e-9 * self.magnitude()).then(|| if v > 0.0 { 1 } else { -1 })
            }
            Coef::Approx(x, _) if *x > 0.0 => Some(1),
            Coef::Approx(x, _) if *x < 0.0 => Some(-1),
            Coef::Approx(..) => None,
        }
    }

    /// `self + other`; `None` when approximate operands cancel to noise.
    pub fn add(&self, other: &Coef) -> Option<Coef> {
        match (self, other) {
            (Coef::Exact(a), Coef::Exact(b)) => {
                let mut m = a.clone();
                for (k, v) in b {
                    accumulate(&mut m, k.clone(), v.clone());
                }
                Some(Coef::Exact(m))
            }
            _ => {
                let p = self.mixed_precision(other);
                let s = self.to_f64() + other.to_f64();
                let scale = self.magnitude().max(other.magnitude());
                if s.abs() <= CANCEL_TOL * scale {
                    return None;
                }
                Coef::approx(s, p)
            }
        }
    }

    pub fn neg(&self) -> Coef {
        match self {
            Coef::Exact(m) => Coef::Exact(m.iter().map(|(k, v)| (k.clone(), -v.clone())).collect()),
            Coef::Approx(x, p) => Coef::Approx(-x, *p),
        }
    }

    pub fn mul(&self, other: &Coef) -> Option<Coef> {
        match (self, other) {
            (Coef::Exact(a), Coef::Exact(b)) => {
                let mut m = BTreeMap::new();
                for (ka, va) in a {
                    for (kb, vb) in b {
                        match mono_mul(ka, kb) {
                            Some((f, k)) => accumulate(&mut m, k, &(va * vb) * &f),
                            None => return Coef::approx(self.to_f64() * other.to_f64(), DEFAULT_PRECISION),
                        }
                    }
                }
                Some(Coef::Exact(m))
            }
            _ if self.is_exact_zero() || other.is_exact_zero() => Some(Coef::int(0)),
            _ => Coef::approx(self.to_f64() * other.to_f64(), self.mixed_precision(other)),
        }
    }

    /// Multiplicative inverse; exact for single monomials.
    pub fn recip(&self) -> Option<Coef> {
        if self.single().is_some() {
            return self.pow_rational(&Rational::from_integer(-1));
        }
        match self {
            Coef::Exact(m) if m.is_empty() => None,
            Coef::Exact(_) => Coef::approx(1.0 / self.to_f64(), DEFAULT_PRECISION),
            Coef::Approx(x, p) if *x != 0.0 => Coef::approx(1.0 / x, *p),
            Coef::Approx(..) => None,
        }
    }

    pub fn pow_rational(&self, p: &Rational) -> Option<Coef> {
        if p.is_zero() {
            return Some(Coef::int(1));
        }
        if let Some((k, a)) = self.single() {
            if let Some(c) = mono_power(k, a, p) {
                return Some(c);
            }
        }
        let x = self.to_f64();
        let y = match p.to_i64().and_then(|k| i32::try_from(k).ok()) {
            Some(k) => x.powi(k),
            None if x > 0.0 => x.powf(p.to_f64()),
            None => return None,
        };
        Coef::approx(y, self.approx_precision())
    }

    /// Elementary function of a coefficient, exact at the special points
    /// `sin`/`cos` of multiples of `pi/2`, `exp 0` and `log 1`.
    pub fn apply(&self, f: Elementary) -> Option<Coef> {
        if let Coef::Exact(m) = self {
            let half_turns = match m.len() {
                0 => Some(Rational::zero()),
                _ => self.pi_multiple().map(|g| &g * &Rational::from_integer(2)),
            };
            if let Some(h) = half_turns.filter(Rational::is_integer) {
                // angle = h * pi/2
                let quarter = h.to_i64().map(|v| v.rem_euclid(4));
                let (s, c) = match quarter? {
                    0 => (0, 1),
                    1 => (1, 0),
                    2 => (0, -1),
                    _ => (-1, 0),
                };
                match f {
                    Elementary::Sin => return Some(Coef::int(s)),
                    Elementary::Cos => return Some(Coef::int(c)),
                    _ => {}
                }
            }
            if let Some(r) = self.as_rational() {
                match f {
                    Elementary::Exp if r.is_zero() => return Some(Coef::int(1)),
                    Elementary::Log if r.is_one() => return Some(Coef::int(0)),
                    _ => {}
                }
            }
            match f {
                Elementary::Abs => {
                    return match self.signum()? {
                        -1 => Some(self.neg()),
                        _ => Some(self.clone()),
                    }
                }
                Elementary::Sqrt if self.signum()? >= 0 => {
                    return self.pow_rational(&Rational::frac(1, 2));
                }
                _ => {}
            }
        }
        let a = Approx::new(self.to_f64(), self.approx_precision()).ok()?;
        a.apply(f).ok().map(|y| Coef::Approx(y.value(), y.precision()))
    }

    pub fn to_scalar(&self) -> Scalar {
        match self.as_rational() {
            Some(r) => Scalar::Exact(r),
            None => Scalar::Approx(
                Approx::new(self.to_f64(), self.approx_precision())
                    .unwrap_or_else(|_| Approx::new(0.0, DEFAULT_PRECISION).expect("finite")),
            ),
        }
    }
}

fn accumulate(m: &mut BTreeMap<Mono, Rational>, k: Mono, v: Rational) {
    let next = m.get(&k).map_or_else(|| v.clone(), |x| x + &v);
    if next.is_zero() {
        m.remove(&k);
    } else {
        m.insert(k, next);
    }
}

/// `(a·m)^p` for a single monomial, exact when the result stays in the ring.
fn mono_power(k: &Mono, a: &Rational, p: &Rational) -> Option<Coef> {
    let (mut factor, a_mono) = match p.to_i64() {
        Some(e) if p.is_integer() => (a.checked_pow(e).ok()?, Mono::default()),
        _ => rational_power(a, p)?,
    };
    let mut surd = a_mono.surd;
    for (q, e) in &k.surd {
        let next = surd.get(q).map_or_else(|| e * p, |v| v + &(e * p));
        surd.insert(*q, next);
    }
    let (f, mono) = reduce(Rational::one(), &k.pi * p, surd)?;
    factor = &factor * &f;
    if factor.numer().is_zero() {
        return Some(Coef::int(0));
    }
    let mut m = BTreeMap::new();
    m.insert(mono, factor);
    Some(Coef::Exact(m))
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.pi.is_zero() {
            parts.push(if self.pi.is_one() { "pi".to_string() } else { format!("pi^({})", self.pi) });
        }
        for (p, e) in &self.surd {
            parts.push(format!("{p}^({e})"));
        }
        f.write_str(&parts.join("*"))
    }
}

impl fmt::Display for Coef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coef::Exact(m) if m.is_empty() => f.write_str("0"),
            Coef::Exact(m) => {
                for (i, (k, a)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    if k.is_one() {
                        write!(f, "{a}")?;
                    } else {
                        write!(f, "{a}*{k}")?;
                    }
                }
                Ok(())
            }
            Coef::Approx(x, _) => write!(f, "~{x}"),
        }
    }
}
