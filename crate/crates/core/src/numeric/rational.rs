use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number in lowest terms with a positive denominator.
///
/// Backed by `num_rational::BigRational`, which keeps the canonical form
/// after every operation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

/// Results of `pow_int` wider than this many bits are refused by
/// [`Rational::checked_pow`].
pub const POW_BIT_LIMIT: u64 = 16_384;

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::domain("rational", "zero denominator"));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    /// Shorthand for small literals; panics on a zero denominator.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Rational::new(numer, denom).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_big(r: BigRational) -> Self {
        Rational(r)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.0.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> Self {
        Rational(self.0.floor())
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Huge numerators/denominators: go through logarithms of the parts.
            let n = self.0.numer();
            let d = self.0.denom();
            let ln = big_ln(&n.abs()) - big_ln(d);
            let v = ln.exp();
            if n.is_negative() {
                -v
            } else {
                v
            }
        })
    }

    /// Exact value of a finite float.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.is_zero() {
            return Err(Error::domain("div", format!("{self} / 0")));
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rational> {
        Rational::one().checked_div(self)
    }

    /// `self^exp`, exact. Refuses results wider than [`POW_BIT_LIMIT`] bits.
    pub fn checked_pow(&self, exp: i64) -> Result<Rational> {
        if exp < 0 && self.is_zero() {
            return Err(Error::domain("pow", format!("0^{exp}")));
        }
        let bits = self.0.numer().bits().max(self.0.denom().bits());
        if bits.saturating_mul(exp.unsigned_abs()) > POW_BIT_LIMIT {
            return Err(Error::not_representable(format!(
                "exact power {self}^{exp} exceeds {POW_BIT_LIMIT} bits"
            )));
        }
        let e = i32::try_from(exp).map_err(|_| Error::not_representable("exponent too large"))?;
        Ok(Rational(num_traits::Pow::pow(&self.0, e)))
    }

    /// Exact `k`-th root when both numerator and denominator are perfect
    /// `k`-th powers.
    pub fn exact_root(&self, k: u32) -> Option<Rational> {
        if k == 0 {
            return None;
        }
        if self.is_negative() && k % 2 == 0 {
            return None;
        }
        let n = self.0.numer();
        let d = self.0.denom();
        let rn = n.nth_root(k);
        let rd = d.nth_root(k);
        if num_traits::Pow::pow(&rn, k) == *n && num_traits::Pow::pow(&rd, k) == *d {
            Some(Rational(BigRational::new(rn, rd)))
        } else {
            None
        }
    }

    /// Exact `self^p` for rational `p` if the result is rational.
    pub fn exact_pow_rational(&self, p: &Rational) -> Option<Rational> {
        let k = p.denom().to_u32()?;
        let root = self.exact_root(k)?;
        let e = p.numer().to_i64()?;
        root.checked_pow(e).ok()
    }

    /// Binomial coefficient `C(p, k)` for rational `p`.
    pub fn binomial(p: &Rational, k: u32) -> Rational {
        let mut acc = Rational::one();
        for j in 0..k {
            let jr = Rational::from_integer(j);
            acc = &(&acc * &(p - &jr)) * &Rational::frac(1, i64::from(j) + 1);
        }
        acc
    }

    pub fn factorial_recip(k: u32) -> Rational {
        let mut d = BigInt::one();
        for j in 2..=k {
            d *= j;
        }
        Rational(BigRational::new(BigInt::one(), d))
    }

    /// Simplest rational (smallest denominator) in the closed interval `[lo, hi]`.
    pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        if lo.signum() <= 0 && hi.signum() >= 0 {
            return Rational::zero();
        }
        if hi.is_negative() {
            return -Rational::simplest_between(&-hi.clone(), &-lo.clone());
        }
        stern_brocot(lo, hi)
    }
}

fn big_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap_or(1.0).ln() + (shift as f64) * std::f64::consts::LN_2
}

fn stern_brocot(lo: &Rational, hi: &Rational) -> Rational {
    // Continued-fraction walk; lo and hi are positive.
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    if &(&fl + &Rational::one()) <= hi {
        return &fl + &Rational::one();
    }
    // lo and hi share the integer part; recurse on reciprocals of the
    // fractional parts (order flips).
    let lo_frac = lo - &fl;
    let hi_frac = hi - &fl;
    let inner = stern_brocot(
        &hi_frac.recip().expect("nonzero"),
        &lo_frac.recip().expect("nonzero"),
    );
    &fl + &inner.recip().expect("nonzero")
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p`, `-p`, `p/q` and decimals such as `0.125`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::usage(format!("not a rational number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: Rational = n.parse()?;
            let d: Rational = d.parse()?;
            return n.checked_div(&d).map_err(|_| bad());
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        let denom = num_traits::Pow::pow(BigInt::from(10u32), frac_part.len());
        let r = Rational(BigRational::new(numer, denom));
        Ok(if neg { -r } else { r })
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        Rational(&self.0 * &rhs.0)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational(self.0 + rhs.0)
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational(self.0 - rhs.0)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational(self.0 * rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.0 == BigRational::from_integer(BigInt::from(*other))
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}
